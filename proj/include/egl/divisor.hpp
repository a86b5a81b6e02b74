#pragma once

#include <functional>
#include <vector>

#include "egl/geometry.hpp"

namespace egl {

/// Local chart (x_1..x_{n-2k}, z_1..z_k), each z_j stored as a real pair.
struct DivisorLocalModel {
  int n = 2;
  int k = 1;

  DivisorLocalModel(int n_, int k_) : n(n_), k(k_) {
    if (k < 0 || n < 2 * k)
      throw Error(ErrorCode::DimensionMismatch, "divisor model needs n >= 2k >= 0");
  }
  int real_dims() const { return n - 2 * k; }
  int z_offset(int j) const { return real_dims() + 2 * j; }
  cplx z(const Vec &p, int j) const { return getc(p, z_offset(j)); }
};

inline double ideal_generator(const DivisorLocalModel &m, const Point &p) {
  double v = 1.0;
  for (int j = 0; j < m.k; ++j)
    v *= std::norm(m.z(p, j));
  return v;
}

inline int multiplicity(const DivisorLocalModel &m, const Point &p) {
  int c = 0;
  for (int j = 0; j < m.k; ++j)
    if (p[m.z_offset(j)] == 0.0 && p[m.z_offset(j) + 1] == 0.0)
      ++c;
  return c;
}

struct AlgebroidFrame {
  Point base;
  std::vector<Vec> vectors;
};

/// d/dx_i, then per factor r d/dr and d/dtheta.
inline AlgebroidFrame algebroid_frame(const DivisorLocalModel &m, const Point &p) {
  if (p.size() != m.n)
    throw Error(ErrorCode::DimensionMismatch, "algebroid_frame: point dimension");
  AlgebroidFrame f{p, {}};
  for (int i = 0; i < m.real_dims(); ++i)
    f.vectors.push_back(Vec::Unit(m.n, i));
  for (int j = 0; j < m.k; ++j) {
    int o = m.z_offset(j);
    double v1 = p[o], v2 = p[o + 1];
    Vec radial = Vec::Zero(m.n), angular = Vec::Zero(m.n);
    radial[o] = v1;
    radial[o + 1] = v2;
    angular[o] = -v2;
    angular[o + 1] = v1;
    f.vectors.push_back(radial);
    f.vectors.push_back(angular);
  }
  return f;
}

enum class ResidueVariant { Nonzero, Zero };

/// Nonzero: {r^2 d/dx, r^2 d/dy} on R^2.
/// Zero: realification of {w d/dw, w d/dz} on C^2 = R^4 where w, the first
/// complex coordinate, cuts out the divisor. A holomorphic field f d/du gives
/// the two real fields f d/du and (i f) d/du.
inline std::function<AlgebroidFrame(const Point &)> residue_model_frame(ResidueVariant v) {
  if (v == ResidueVariant::Nonzero)
    return [](const Point &p) {
      if (p.size() != 2)
        throw Error(ErrorCode::DimensionMismatch, "nonzero residue frame lives on R^2");
      double r2 = p.squaredNorm();
      return AlgebroidFrame{p, {Vec::Unit(2, 0) * r2, Vec::Unit(2, 1) * r2}};
    };
  return [](const Point &p) {
    if (p.size() != 4)
      throw Error(ErrorCode::DimensionMismatch, "zero residue frame lives on R^4");
    cplx w = getc(p, 0);
    AlgebroidFrame f{p, {}};
    for (int slot = 0; slot < 2; ++slot)
      for (cplx c : {w, cplx(0, 1) * w}) {
        Vec e = Vec::Zero(4);
        setc(e, 2 * slot, c);
        f.vectors.push_back(e);
      }
    return f;
  };
}

} // namespace egl
