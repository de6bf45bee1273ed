#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nlwlab/model.hpp"

namespace nlwlab {

// Radial grid samples of (phi, d_t phi) at one time. Nodes sit at r_i = i*dr.
struct SolverState {
  double t = 0.0;
  double r_max = 0.0;
  double dr = 0.0;
  std::vector<double> phi;
  std::vector<double> pi;

  std::size_t nodes() const { return phi.size(); }
  double r(std::size_t i) const { return static_cast<double>(i) * dr; }

  static SolverState zeros(double dr, double r_max, double t = 0.0);
  // Throws InvalidArgument on inconsistent sizes or grid metadata.
  void check() const;
};

// One sample of the field with first derivatives.
struct FieldPoint {
  double t = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double dphi_dt = 0.0;
  double dphi_dr = 0.0;

  double L() const { return dphi_dt + dphi_dr; }
  double Lbar() const { return dphi_dt - dphi_dr; }
};

// Coarsened (t, r) history of a run. Immutable once the run is over.
// Field arrays are row-major in time: index j*nr + i.
class SpacetimeRecord {
 public:
  ModelParams model;
  bool nonlinear = true;
  std::string id = "anonymous";

  double t0 = 0.0;
  double dr_solver = 0.0;
  double dt_solver = 0.0;
  double r_max = 0.0;
  std::size_t record_every = 4;
  std::size_t record_stride = 2;

  double dt_rec = 0.0;
  double dr_rec = 0.0;
  std::size_t nt = 0;
  std::size_t nr = 0;
  std::vector<double> phi;
  std::vector<double> dphi_dt;
  std::vector<double> dphi_dr;
  // Scheme residual at the record nodes, written by the solver. Empty for
  // records from elsewhere; the auditor then estimates it on the lattice.
  std::vector<double> residual;

  // Support of the initial data, used for the causal boundary.
  double support_radius = 0.0;
  // Safety distance kept from the region the outer boundary can influence.
  double causal_margin = 1.0;

  // Full resolution states kept at requested times.
  std::vector<SolverState> snapshots;

  double time(std::size_t j) const { return t0 + static_cast<double>(j) * dt_rec; }
  double radius(std::size_t i) const { return static_cast<double>(i) * dr_rec; }
  double t_final() const { return time(nt - 1); }
  double r_rec_max() const { return radius(nr - 1); }
  std::size_t index(std::size_t j, std::size_t i) const { return j * nr + i; }

  FieldPoint node(std::size_t j, std::size_t i) const;

  // Largest radius at time t not reached by signals from the outer boundary.
  double causal_radius(double t) const;
  bool covers(double t, double r, double tol = 1e-9) const;

  // Bilinear interpolation. Throws CoverageError outside coverage.
  FieldPoint sample(double t, double r) const;

  // Snapshot closest to t within tol, or nullptr.
  const SolverState* snapshot_at(double t, double tol) const;
};

}  // namespace nlwlab
