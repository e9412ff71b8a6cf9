#pragma once

#include "wavescat/field.hpp"

namespace wavescat {

// Two-field three-level state. The previous auxiliary level is retained
// because the pressure update averages lambda over three time levels and the
// energy remainder reads back one extra history level.
struct WaveState {
  CellField<double> p_prev, p_curr;
  EdgeField<double> lam_prev, lam;
  double t = 0;
  long n = 0;
};

// Monolithic four-field vector (p, q, chi, lambda); used both as the state
// of the midpoint scheme and as the Krylov vector of its implicit solve.
struct FourField {
  CellField<double> p, q;
  EdgeField<double> chi, lam;

  static FourField zero(Eigen::Index nx, Eigen::Index ny) {
    FourField f;
    f.p = CellField<double>::Zero(nx, ny);
    f.q = CellField<double>::Zero(nx, ny);
    f.chi = EdgeField<double>::zero(nx, ny);
    f.lam = EdgeField<double>::zero(nx, ny);
    return f;
  }

  FourField& operator+=(const FourField& o) {
    p += o.p;
    q += o.q;
    chi += o.chi;
    lam += o.lam;
    return *this;
  }
  FourField& operator-=(const FourField& o) {
    p -= o.p;
    q -= o.q;
    chi -= o.chi;
    lam -= o.lam;
    return *this;
  }
  FourField& operator*=(double s) {
    p *= s;
    q *= s;
    chi *= s;
    lam *= s;
    return *this;
  }
  friend FourField operator+(FourField a, const FourField& b) { return a += b; }
  friend FourField operator-(FourField a, const FourField& b) { return a -= b; }
  friend FourField operator*(double s, FourField a) { return a *= s; }
};

inline double dot(const FourField& a, const FourField& b) {
  return dot(a.p, b.p) + dot(a.q, b.q) + dot(a.chi, b.chi) + dot(a.lam, b.lam);
}

struct FourFieldState {
  FourField phi;
  double t = 0;
  long n = 0;
};

}  // namespace wavescat
