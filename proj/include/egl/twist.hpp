#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "egl/error.hpp"

namespace egl {

/// (sigma, eps) in (Z/2)^k x| S_k. perm[i] = sigma(i); flips[i] in {0,1}.
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> flips;

  static SignedPermutation identity(int k) {
    SignedPermutation p;
    p.perm.resize(k);
    for (int i = 0; i < k; ++i)
      p.perm[i] = i;
    p.flips.assign(k, 0);
    return p;
  }
  static SignedPermutation flip(int k, int i) {
    auto p = identity(k);
    p.flips.at(i) = 1;
    return p;
  }
  static SignedPermutation transposition(int k, int i, int j) {
    auto p = identity(k);
    std::swap(p.perm.at(i), p.perm.at(j));
    return p;
  }

  int k() const { return static_cast<int>(perm.size()); }
  bool is_identity() const { return *this == identity(k()); }

  /// Throws MalformedPresentation unless perm is a bijection and flips are bits.
  void validate() const {
    if (flips.size() != perm.size())
      throw Error(ErrorCode::MalformedPresentation, "signed permutation: perm/flips sizes differ");
    std::vector<int> seen(perm.size(), 0);
    for (int p : perm) {
      if (p < 0 || p >= k() || seen[p]++)
        throw Error(ErrorCode::MalformedPresentation, "signed permutation: perm is not a bijection");
    }
    for (int f : flips)
      if (f != 0 && f != 1)
        throw Error(ErrorCode::MalformedPresentation, "signed permutation: flips must be 0 or 1");
  }

  SignedPermutation inverse() const {
    SignedPermutation r;
    r.perm.resize(k());
    r.flips.resize(k());
    for (int i = 0; i < k(); ++i)
      r.perm[perm[i]] = i;
    for (int i = 0; i < k(); ++i)
      r.flips[i] = flips[r.perm[i]];
    return r;
  }

  friend bool operator==(const SignedPermutation &a, const SignedPermutation &b) {
    return a.perm == b.perm && a.flips == b.flips;
  }
  friend bool operator!=(const SignedPermutation &a, const SignedPermutation &b) { return !(a == b); }
  friend bool operator<(const SignedPermutation &a, const SignedPermutation &b) {
    return std::tie(a.perm, a.flips) < std::tie(b.perm, b.flips);
  }
};

/// (sigma, eps)(sigma', eps') = (sigma sigma', eps' + sigma'^{-1} . eps),
/// where (sigma'^{-1} . eps)_i = eps_{sigma'(i)}.
inline SignedPermutation operator*(const SignedPermutation &a, const SignedPermutation &b) {
  if (a.k() != b.k())
    throw Error(ErrorCode::DimensionMismatch, "signed permutation product: different k");
  const int k = a.k();
  SignedPermutation r;
  r.perm.resize(k);
  r.flips.resize(k);
  for (int i = 0; i < k; ++i) {
    r.perm[i] = a.perm[b.perm[i]];
    r.flips[i] = b.flips[i] ^ a.flips[b.perm[i]];
  }
  return r;
}

/// Permute, then conjugate flagged coordinates: out_{sigma(j)} = conj^{eps_j}(z_j).
inline std::vector<std::complex<double>> act(const SignedPermutation &g,
                                             const std::vector<std::complex<double>> &z) {
  if (static_cast<int>(z.size()) != g.k())
    throw Error(ErrorCode::DimensionMismatch, "signed permutation action: size mismatch");
  std::vector<std::complex<double>> out(z.size());
  for (int j = 0; j < g.k(); ++j)
    out[g.perm[j]] = g.flips[j] ? std::conj(z[j]) : z[j];
  return out;
}

struct SemidirectElement {
  std::vector<std::complex<double>> z; // may be empty for the bare discrete part
  SignedPermutation g;
};

/// (z, g)(z', g') = (z * g.z', g g')
inline SemidirectElement semidirect_mul(const SemidirectElement &a, const SemidirectElement &b) {
  if (a.g.k() != b.g.k() || a.z.size() != b.z.size())
    throw Error(ErrorCode::DimensionMismatch, "semidirect_mul: different k");
  SemidirectElement r{{}, a.g * b.g};
  if (!a.z.empty()) {
    if (static_cast<int>(a.z.size()) != a.g.k())
      throw Error(ErrorCode::DimensionMismatch, "semidirect_mul: torus part has wrong size");
    auto moved = act(a.g, b.z);
    r.z.resize(a.z.size());
    for (std::size_t i = 0; i < a.z.size(); ++i)
      r.z[i] = a.z[i] * moved[i];
  }
  return r;
}

inline SemidirectElement semidirect_inverse(const SemidirectElement &a) {
  SignedPermutation gi = a.g.inverse();
  SemidirectElement r{{}, gi};
  if (!a.z.empty()) {
    std::vector<std::complex<double>> zi(a.z.size());
    for (std::size_t i = 0; i < a.z.size(); ++i)
      zi[i] = 1.0 / a.z[i];
    r.z = act(gi, zi);
  }
  return r;
}

constexpr int max_twist_k = 8;

struct TwistGroup {
  int k = 0;
  std::vector<SignedPermutation> elements; // sorted
  bool untwisted_coorientable() const { return elements.size() == 1; }
  std::size_t order() const { return elements.size(); }
  bool contains(const SignedPermutation &g) const {
    return std::binary_search(elements.begin(), elements.end(), g);
  }
};

/// Closure of the generators in (Z/2)^k x| S_k.
inline TwistGroup twist_group(int k, const std::vector<SignedPermutation> &generators) {
  if (k > max_twist_k)
    throw Error(ErrorCode::KTooLarge, "twist_group: k = " + std::to_string(k) + " exceeds 8");
  if (k < 0)
    throw Error(ErrorCode::DimensionMismatch, "twist_group: negative k");
  for (const auto &g : generators) {
    g.validate();
    if (g.k() != k)
      throw Error(ErrorCode::DimensionMismatch, "twist_group: generator of the wrong size");
  }
  std::set<SignedPermutation> seen{SignedPermutation::identity(k)};
  std::vector<SignedPermutation> frontier{SignedPermutation::identity(k)};
  while (!frontier.empty()) {
    std::vector<SignedPermutation> next;
    for (const auto &x : frontier)
      for (const auto &g : generators) {
        SignedPermutation y = x * g;
        if (seen.insert(y).second)
          next.push_back(y);
      }
    frontier = std::move(next);
  }
  return {k, std::vector<SignedPermutation>(seen.begin(), seen.end())};
}

/// Every element of (Z/2)^k x| S_k.
inline std::vector<SignedPermutation> all_signed_permutations(int k) {
  if (k > max_twist_k)
    throw Error(ErrorCode::KTooLarge, "all_signed_permutations: k exceeds 8");
  std::vector<SignedPermutation> out;
  auto p = SignedPermutation::identity(k);
  do {
    for (int mask = 0; mask < (1 << k); ++mask) {
      for (int i = 0; i < k; ++i)
        p.flips[i] = (mask >> i) & 1;
      out.push_back(p);
    }
  } while (std::next_permutation(p.perm.begin(), p.perm.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Monodromy representations and words

/// A word is a list of letters "g" or "g^-1".
using Word = std::vector<std::string>;

struct MonodromyRep {
  int k = 0;
  std::vector<std::string> generators;
  std::map<std::string, SignedPermutation> images;

  MonodromyRep() = default;
  MonodromyRep(int k_, std::vector<std::string> gens, std::map<std::string, SignedPermutation> im)
      : k(k_), generators(std::move(gens)), images(std::move(im)) {
    for (const auto &g : generators) {
      auto it = images.find(g);
      if (it == images.end())
        throw Error(ErrorCode::UnknownGenerator, "monodromy: no image for generator '" + g + "'");
      it->second.validate();
      if (it->second.k() != k)
        throw Error(ErrorCode::DimensionMismatch, "monodromy: image of '" + g + "' has wrong size");
    }
    if (images.size() != generators.size())
      throw Error(ErrorCode::UnknownGenerator, "monodromy: image given for an undeclared generator");
  }

  SignedPermutation letter(const std::string &l) const {
    bool inverse = l.size() > 3 && l.compare(l.size() - 3, 3, "^-1") == 0;
    std::string name = inverse ? l.substr(0, l.size() - 3) : l;
    auto it = images.find(name);
    if (it == images.end())
      throw Error(ErrorCode::UnknownGenerator, "unknown generator '" + name + "'");
    return inverse ? it->second.inverse() : it->second;
  }

  SignedPermutation evaluate(const Word &w) const {
    SignedPermutation r = SignedPermutation::identity(k);
    for (const auto &l : w)
      r = r * letter(l);
    return r;
  }

  std::vector<SignedPermutation> image_generators() const {
    std::vector<SignedPermutation> out;
    for (const auto &g : generators)
      out.push_back(images.at(g));
    return out;
  }
};

struct Stratum {
  std::string name;
  MonodromyRep rep;
  std::vector<Word> kernel_words; // generators of ker((iota_N)_*)
};

struct NCDecision {
  bool hausdorff = true;
  std::optional<std::string> witness_stratum;
  std::optional<Word> witness_word;
};

/// Every kernel word must evaluate to the identity under its stratum's monodromy.
inline NCDecision hausdorff_nc_decision(const std::vector<Stratum> &strata) {
  NCDecision d;
  for (const auto &s : strata)
    for (const auto &w : s.kernel_words)
      if (!s.rep.evaluate(w).is_identity() && d.hausdorff) {
        d.hausdorff = false;
        d.witness_stratum = s.name;
        d.witness_word = w;
      }
  return d;
}

// ---------------------------------------------------------------------------
// Arrows of the twisted local models

struct TwistedArrow {
  std::vector<double> source, target;
  std::vector<std::complex<double>> z;
  Word word;
  SignedPermutation element;
};

inline TwistedArrow make_twisted_arrow(std::vector<double> source, std::vector<double> target,
                                       std::vector<std::complex<double>> z, Word word,
                                       const MonodromyRep &rep) {
  for (const auto &c : z)
    if (c == std::complex<double>(0.0, 0.0))
      throw Error(ErrorCode::ChartInvalid, "twisted arrow: torus coordinates must be nonzero");
  if (static_cast<int>(z.size()) != rep.k)
    throw Error(ErrorCode::StratumMismatch, "twisted arrow: torus rank differs from the representation");
  SignedPermutation e = rep.evaluate(word);
  return {std::move(source), std::move(target), std::move(z), std::move(word), std::move(e)};
}

/// a1 after a2: z = a1.z * (a1.g . a2.z), word concatenated and re-evaluated.
inline TwistedArrow twisted_compose(const TwistedArrow &a1, const TwistedArrow &a2, const MonodromyRep &rep,
                                    double endpoint_tol = 1e-12) {
  if (a1.z.size() != a2.z.size())
    throw Error(ErrorCode::StratumMismatch, "twisted_compose: arrows over different strata");
  if (a1.source.size() != a2.target.size())
    throw Error(ErrorCode::EndpointMismatch, "twisted_compose: endpoint dimensions differ");
  for (std::size_t i = 0; i < a1.source.size(); ++i)
    if (std::abs(a1.source[i] - a2.target[i]) > endpoint_tol)
      throw Error(ErrorCode::EndpointMismatch, "twisted_compose: source of first != target of second");
  SemidirectElement r = semidirect_mul({a1.z, a1.element}, {a2.z, a2.element});
  Word w = a1.word;
  w.insert(w.end(), a2.word.begin(), a2.word.end());
  SignedPermutation e = rep.evaluate(w);
  if (e != r.g)
    throw Error(ErrorCode::MalformedPresentation, "twisted_compose: stored elements disagree with the representation");
  return {a2.source, a1.target, std::move(r.z), std::move(w), std::move(e)};
}

/// Same torus part, discrete part re-evaluated in a coarser representation.
inline TwistedArrow kappa_restrict(const TwistedArrow &a, const MonodromyRep &coarse) {
  TwistedArrow r = a;
  r.element = coarse.evaluate(a.word);
  return r;
}

// ---------------------------------------------------------------------------
// Isotropy of normal coverings

struct GroupDescriptor {
  std::string fiber;   // continuous isotropy H_O, e.g. "ℂ*"
  std::string image;   // discrete image; empty when trivial
  std::size_t image_order = 1;

  std::string str() const { return image.empty() ? fiber : fiber + "⋊" + image; }
};

namespace detail {

inline std::string subscript(std::size_t n) {
  static const char *digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string s, d = std::to_string(n);
  for (char c : d)
    s += digits[c - '0'];
  return s;
}

inline std::string name_discrete_group(const TwistGroup &G) {
  bool pure_flips = true, pure_perms = true;
  for (const auto &e : G.elements) {
    pure_flips = pure_flips && e.perm == SignedPermutation::identity(G.k).perm;
    pure_perms = pure_perms && std::all_of(e.flips.begin(), e.flips.end(), [](int f) { return f == 0; });
  }
  const std::size_t n = G.order();
  if (pure_flips) {
    int r = 0;
    while ((std::size_t(1) << r) < n)
      ++r;
    return r == 1 ? "ℤ/2" : "(ℤ/2)^" + std::to_string(r);
  }
  if (pure_perms) {
    std::size_t fact = 1;
    int m = 1;
    while (fact < n)
      fact *= ++m;
    if (fact == n)
      return "Σ" + subscript(m);
  }
  return "T[order " + std::to_string(n) + "]";
}

} // namespace detail

/// H_O x| (image of the monodromy), the image computed by closure.
inline GroupDescriptor covering_isotropy(const MonodromyRep &orbit_rep, const std::string &fiber_isotropy) {
  TwistGroup G = twist_group(orbit_rep.k, orbit_rep.image_generators());
  GroupDescriptor d{fiber_isotropy, "", G.order()};
  if (!G.untwisted_coorientable())
    d.image = detail::name_discrete_group(G);
  return d;
}

} // namespace egl
