#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polx/mcoracle.hpp"
#include "polx/source.hpp"
#include "polx/types.hpp"

namespace polx {

struct MediumBlock {
  std::string model = "gaussian";  // gaussian | gaussian_transverse | tabulated
  double alpha = 1.0;
  double gamma = kTwoPi / 50.0;
  double gamma_j = kTwoPi / 50.0;
  double k = kTwoPi;
  double ell_z = 1.0;
  std::string table;  // relative paths resolve against the config file
};

struct SourceBlock {
  std::string kind = "gaussian_tm";  // gaussian_tm | anisotropic_tm | current
  double gamma_j = 0.0;               // 0: use medium.gamma_j
  double width_minor = 0.03;
  double width_major = 0.1;
  double rotation = kPi / 4.0;
  double jx = 1.0, jy = 0.0, jz = 0.0;
};

struct GridBlock {
  std::string layout = "polar";  // polar | cartesian
  int n_radial = 160;
  int n_angular = 64;
  double kappa_max = 0.5;
  double spacing = 0.0125;
};

struct KernelBlock {
  int n_phi = 128;
  int n_window = 32;
  int n_middle = 32;
  int n_outer = 48;
  double radius = 1.0;
};

struct EvolveBlock {
  double z_end = 5.0;
  std::string z_units = "mfp";  // mfp | absolute
  double dz = 0.0;              // 0: innermost mfp / 200
  std::vector<double> snapshots{0.0, 1.0, 2.5, 5.0};
  double cutoff_sigma = 7.0;
  int record_every = 1;
};

struct MfpBlock {
  int n_points = 24;
  double kappa_max = 0.9;
};

struct HfBlock {
  std::vector<double> gammas{kTwoPi / 50.0, kTwoPi / 100.0, kTwoPi / 200.0};
  double kappa = 0.2;          // probe |kappa| in rescaled units
  double lattice_radius = 1.0; // rescaled units
  double kbar_j = 1.0;
  double z_end = 1.0;          // high-frequency mean free paths
  int n_steps = 200;
};

struct RtBlock {
  std::vector<double> kappas{0.05, 0.15, 0.3, 0.45, 0.6};
  double tolerance = 1e-6;
};

struct FieldBlock {
  std::vector<double> points{0.0, 0.0, 1.0};  // flattened (x, y, z) triples
  int n_radial = 48;
  int n_angular = 64;
  double kappa_max = 0.95;
};

struct McBlock {
  double epsilon = 1e-3;
  int n_realizations = 400;
  double box = 8.0;
  double lattice_radius = 2.6;
  int n_records = 40;
  double z_end = 0.0;
  double dz = 0.0;
};

struct RunConfig {
  MediumBlock medium;
  SourceBlock source;
  GridBlock grid;
  KernelBlock kernel;
  EvolveBlock evolve;
  MfpBlock mfp;
  HfBlock hf;
  RtBlock rt;
  FieldBlock field;
  McBlock mc;
  std::string out_dir = "polx_out";
  std::uint64_t seed = 20240611;
  int threads = 0;

  SpectralMedium make_medium() const;
  SourceSpec make_source() const;
  EnsembleConfig make_ensemble() const;
  /// Fully resolved configuration as JSON text (compact, stable key order).
  std::string to_json() const;
};

/// Parses an INI file. Unknown sections or keys and malformed values raise
/// ValidationError naming the key and its line.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

}  // namespace polx
