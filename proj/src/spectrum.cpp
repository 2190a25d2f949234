#include "selfaffine/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace selfaffine {

std::string to_string(const DigitWord& w) {
  std::string out;
  for (std::size_t i = 0; i < w.digits.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(w.digits[i]);
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::basis_consistent: return "BASIS-CONSISTENT";
    case Verdict::incomplete: return "INCOMPLETE";
    case Verdict::indeterminate: return "INDETERMINATE";
  }
  return "?";
}

std::vector<Point> SpectrumEnumeration::lambdas() const {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.lambda);
  return out;
}

SpectrumEnumeration enumerate_radix(const RationalMatrix& m, const std::vector<Point>& digits, std::size_t zero_index,
                                    int depth) {
  if (depth < 0) throw std::invalid_argument("enumeration depth must be nonnegative");
  if (digits.empty() || zero_index >= digits.size()) throw std::invalid_argument("bad digit set");
  const std::size_t nu = m.rows();
  const std::size_t n = digits.size();
  // terms[k][d] = M^k digit_d
  std::vector<std::vector<Point>> terms;
  RationalMatrix power = RationalMatrix::identity(nu);
  for (int k = 0; k < depth; ++k) {
    std::vector<Point> row;
    for (const auto& d : digits) row.push_back(power * d);
    terms.push_back(std::move(row));
    power = power * m;
  }

  SpectrumEnumeration e;
  e.depth = depth;
  e.dim = nu;
  std::set<Point> seen;
  auto emit = [&](Point lambda, std::vector<std::size_t> word) {
    if (!seen.insert(lambda).second) {
      ++e.collision_count;
      return;
    }
    e.points.push_back({std::move(lambda), DigitWord{std::move(word)}});
  };
  emit(Point(nu, Rational(0)), {});
  e.level_end.push_back(e.points.size());

  std::vector<std::size_t> word;
  for (int len = 1; len <= depth; ++len) {
    word.assign(static_cast<std::size_t>(len), zero_index);
    // Most significant position first so the order is lexicographic from the top digit.
    std::function<void(int, const Point&)> fill = [&](int pos, const Point& acc) {
      if (pos < 0) {
        emit(acc, word);
        return;
      }
      for (std::size_t d = 0; d < n; ++d) {
        if (pos == len - 1 && d == zero_index) continue;
        word[static_cast<std::size_t>(pos)] = d;
        fill(pos - 1, acc + terms[static_cast<std::size_t>(pos)][d]);
      }
    };
    fill(len - 1, Point(nu, Rational(0)));
    e.level_end.push_back(e.points.size());
  }
  e.lambda_real.reserve(e.points.size() * nu);
  for (const auto& p : e.points)
    for (const auto& q : p.lambda) e.lambda_real.push_back(q.get_d());
  return e;
}

SpectrumEnumeration enumerate_P(const AffineSystem& sys, int depth) {
  const auto z = sys.zero_index_L();
  if (!z) throw std::invalid_argument("enumerate_P needs 0 in L");
  return enumerate_radix(sys.R().adjoint(), sys.L(), *z, depth);
}

SpectrumEnumeration enumerate_B(const AffineSystem& sys, int depth) {
  const auto z = sys.zero_index_B();
  if (!z) throw std::invalid_argument("enumerate_B needs 0 in B");
  std::vector<Point> digits;
  for (const auto& b : sys.B()) digits.push_back(Rational(-1) * (sys.R().matrix() * b));
  return enumerate_radix(sys.R().matrix(), digits, *z, depth);
}

Point point_of(const AffineSystem& sys, const DigitWord& w) {
  Point acc(sys.dim(), Rational(0));
  for (std::size_t k = w.digits.size(); k-- > 0;) acc = sys.R().adjoint() * acc + sys.L().at(w.digits[k]);
  return acc;
}

std::optional<DigitWord> digits_of(const AffineSystem& sys, const Point& lambda, int max_depth) {
  if (lambda.size() != sys.dim()) throw std::invalid_argument("digits_of: dimension mismatch");
  // With R* integral every expansion stays in (1/D) Z^nu, D the common denominator of L.
  std::optional<mpz_class> denom;
  if (sys.R().is_integer()) {
    mpz_class d = 1;
    for (const auto& l : sys.L())
      for (const auto& q : l) d = lcm(d, mpz_class(q.get_den()));
    denom = d;
  }
  auto admissible = [&](const Point& p) {
    if (!denom) return true;
    for (const auto& q : p)
      if (!mpz_divisible_p(denom->get_mpz_t(), q.get_den_mpz_t())) return false;
    return true;
  };
  std::vector<DigitWord> found;
  std::vector<std::size_t> stack;
  std::function<void(const Point&, int)> search = [&](const Point& x, int remaining) {
    if (found.size() > 1) return;
    if (is_zero(x)) {
      found.push_back(DigitWord{stack});
      return;
    }
    if (remaining == 0 || !admissible(x)) return;
    for (std::size_t d = 0; d < sys.size(); ++d) {
      stack.push_back(d);
      search(sys.R().adjoint_inverse() * (x - sys.L()[d]), remaining - 1);
      stack.pop_back();
    }
  };
  search(lambda, max_depth);
  if (found.size() != 1) return std::nullopt;
  return found.front();
}

GramReport gram_matrix(const FourierTransform& ft, std::span<const Point> points) {
  const std::size_t n = points.size();
  {
    std::set<Point> uniq(points.begin(), points.end());
    if (uniq.size() != n) throw std::invalid_argument("gram_matrix: points must be pairwise distinct");
  }
  GramReport rep;
  rep.points.assign(points.begin(), points.end());
  rep.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::vector<double> d = to_double(points[j] - points[i]);
      const FourierEvaluation ev = ft(d);
      rep.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ev.value;
      rep.max_tail_bound = std::max(rep.max_tail_bound, ev.tail_bound);
      const double mag = std::abs(ev.value);
      if (i == j) {
        rep.max_diagonal_defect = std::max(rep.max_diagonal_defect, std::abs(ev.value - 1.0));
      } else {
        rep.max_off_diagonal = std::max(rep.max_off_diagonal, mag);
      }
    }
  // Witness: first pair in enumeration order attaining the max (ties up to rounding).
  const double cut = rep.max_off_diagonal * (1 - 1e-9);
  bool found = false;
  for (std::size_t i = 0; i < n && !found; ++i)
    for (std::size_t j = i + 1; j < n && !found; ++j) {
      if (std::abs(rep.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) >= cut) {
        rep.worst_i = i;
        rep.worst_j = j;
        found = rep.max_off_diagonal > 0;
      }
    }
  return rep;
}

GramReport gram_matrix(const AffineSystem& sys, std::span<const Point> points, int fourier_depth) {
  if (fourier_depth <= 0) return gram_matrix(fourier_transform(sys), points);
  auto ev = std::make_shared<const FourierEvaluator>(sys);
  return gram_matrix([ev, fourier_depth](std::span<const double> t) { return ev->evaluate(t, fourier_depth); },
                     points);
}

std::vector<double> q1_profile(const FourierTransform& ft, const SpectrumEnumeration& pset, std::span<const double> t,
                               double* max_tail) {
  const std::size_t nu = pset.dim;
  if (t.size() != nu) throw std::invalid_argument("q1: dimension mismatch");
  std::vector<double> diff(nu);
  std::vector<double> out;
  double sum = 0, tail = 0;
  std::size_t begin = 0;
  for (std::size_t end : pset.level_end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t k = 0; k < nu; ++k) diff[k] = t[k] - pset.lambda_real[i * nu + k];
      const FourierEvaluation ev = ft(diff);
      sum += std::norm(ev.value);
      tail = std::max(tail, ev.tail_bound);
    }
    out.push_back(sum);
    begin = end;
  }
  if (max_tail) *max_tail = tail;
  return out;
}

Q1Result q1(const FourierTransform& ft, const SpectrumEnumeration& pset, std::span<const double> t, int p_depth) {
  if (p_depth < 0 || p_depth > pset.depth) throw std::invalid_argument("q1: p_depth outside the enumeration");
  Q1Result r;
  const auto prof = q1_profile(ft, pset, t, &r.max_tail_bound);
  const auto p = static_cast<std::size_t>(p_depth);
  r.partial_sum = prof[p];
  r.increment = p == 0 ? prof[0] : prof[p] - prof[p - 1];
  r.p_depth = p_depth;
  return r;
}

Q1Result q1(const AffineSystem& sys, std::span<const double> t, int p_depth, int fourier_depth) {
  if (p_depth < 1) throw std::invalid_argument("q1: p_depth must be >= 1");
  const auto pset = enumerate_P(sys, p_depth);
  if (fourier_depth <= 0) return q1(fourier_transform(sys), pset, t, p_depth);
  auto ev = std::make_shared<const FourierEvaluator>(sys);
  return q1([ev, fourier_depth](std::span<const double> x) { return ev->evaluate(x, fourier_depth); }, pset, t,
            p_depth);
}

// ---- completeness ----

namespace {

// Q1 truncated at `levels` word lengths, evaluated from the enumeration.
double q1_at(const FourierTransform& ft, const SpectrumEnumeration& pset, std::span<const double> t,
             std::size_t levels) {
  const std::size_t nu = pset.dim;
  std::vector<double> diff(nu);
  double sum = 0;
  for (std::size_t i = 0; i < pset.level_end[levels]; ++i) {
    for (std::size_t k = 0; k < nu; ++k) diff[k] = t[k] - pset.lambda_real[i * nu + k];
    sum += std::norm(ft(diff).value);
  }
  return sum;
}

int affordable_depth(std::size_t n, int cap) {
  // Keep the enumeration below ~2^18 points.
  int d = 0;
  double count = 1;
  while (d < cap && count * static_cast<double>(n) <= 262144.0) {
    count *= static_cast<double>(n);
    ++d;
  }
  return std::max(d, 1);
}

}  // namespace

CompletenessReport completeness_test(const FourierTransform& ft, const AffineSystem& spectrum_sys,
                                     const std::vector<std::vector<double>>& grid, const CompletenessThresholds& th) {
  if (grid.empty()) throw std::invalid_argument("completeness_test: empty grid");
  CompletenessReport rep;
  rep.depth_cap = affordable_depth(spectrum_sys.size(), th.depth_cap);
  const auto pset = enumerate_P(spectrum_sys, rep.depth_cap);
  const std::size_t nu = pset.dim;
  std::vector<double> diff(nu);
  bool all_pass = true, any_fail = false;
  rep.min_partial_sum = std::numeric_limits<double>::infinity();
  int deepest = 1;
  for (const auto& t : grid) {
    if (t.size() != nu) throw std::invalid_argument("completeness_test: grid point dimension mismatch");
    CompletenessPoint cp;
    cp.t = t;
    double sum = 0;
    std::size_t begin = 0;
    for (std::size_t level = 0; level < pset.level_end.size(); ++level) {
      const std::size_t end = pset.level_end[level];
      double inc = 0;
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t k = 0; k < nu; ++k) diff[k] = t[k] - pset.lambda_real[i * nu + k];
        inc += std::norm(ft(diff).value);
      }
      sum += inc;
      begin = end;
      cp.partial_sum = sum;
      cp.increment = inc;
      cp.p_depth = static_cast<int>(level);
      if (level >= 1 && inc < th.eps_conv) {
        cp.stabilized = true;
        break;
      }
    }
    deepest = std::max(deepest, cp.p_depth);
    rep.min_partial_sum = std::min(rep.min_partial_sum, cp.partial_sum);
    all_pass = all_pass && cp.stabilized && cp.partial_sum >= 1.0 - th.eps_pass;
    any_fail = any_fail || (cp.stabilized && cp.partial_sum <= 1.0 - th.eps_fail);
    rep.points.push_back(std::move(cp));
  }
  rep.verdict = all_pass ? Verdict::basis_consistent : any_fail ? Verdict::incomplete : Verdict::indeterminate;

  const auto levels = static_cast<std::size_t>(deepest);
  for (std::size_t j = 0; j < nu; ++j) {
    auto central = [&](double h) {
      std::vector<double> plus(nu, 0.0), minus(nu, 0.0);
      plus[j] = h;
      minus[j] = -h;
      return (q1_at(ft, pset, plus, levels) - q1_at(ft, pset, minus, levels)) / (2 * h);
    };
    const double h = th.fd_step;
    rep.gradient_at_zero.push_back((4 * central(h / 2) - central(h)) / 3);
  }
  return rep;
}

CompletenessReport completeness_test(const AffineSystem& sys, const std::vector<std::vector<double>>& grid,
                                     const CompletenessThresholds& th) {
  return completeness_test(fourier_transform(sys), sys, grid, th);
}

// ---- cliques ----

namespace {

using Mask = unsigned long long;

struct CliqueSearch {
  const std::vector<Mask>& adj;
  std::vector<std::size_t> order;  // by degree, descending
  std::size_t best = 0;

  void expand(std::size_t size, Mask cand) {
    if (cand == 0) {
      best = std::max(best, size);
      return;
    }
    if (size + static_cast<std::size_t>(std::popcount(cand)) <= best) return;
    for (std::size_t v : order) {
      if (!(cand >> v & 1ULL)) continue;
      if (size + static_cast<std::size_t>(std::popcount(cand)) <= best) return;
      expand(size + 1, cand & adj[v]);
      cand &= ~(1ULL << v);
    }
    best = std::max(best, size);
  }
};

std::size_t clique_number(const std::vector<Mask>& adj, Mask within) {
  CliqueSearch s{adj, {}, 0};
  for (std::size_t i = 0; i < adj.size(); ++i) s.order.push_back(i);
  std::stable_sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) {
    return std::popcount(adj[a] & within) > std::popcount(adj[b] & within);
  });
  s.expand(0, within);
  return s.best;
}

}  // namespace

std::vector<std::size_t> max_clique(const std::vector<Mask>& adj) {
  const std::size_t n = adj.size();
  if (n > 64) throw std::length_error("max clique search is exact for at most 64 candidates; heuristic mode is out of scope");
  if (n == 0) return {};
  const Mask all = n == 64 ? ~0ULL : ((1ULL << n) - 1);
  std::size_t need = clique_number(adj, all);
  // Lexicographically first maximum clique: take a vertex whenever the rest can still be completed.
  std::vector<std::size_t> chosen;
  Mask cand = all;
  for (std::size_t i = 0; i < n && need > 0; ++i) {
    if (!(cand >> i & 1ULL)) continue;
    const Mask rest = cand & adj[i] & ~((2ULL << i) - 1);
    if (1 + clique_number(adj, rest) == need) {
      chosen.push_back(i);
      --need;
      cand = rest;
    } else {
      cand &= ~(1ULL << i);
    }
  }
  return chosen;
}

std::vector<Rational> max_orthogonal_family(const ZeroSetPredicate& z, std::span<const Rational> candidates) {
  const std::size_t n = candidates.size();
  if (n > 64) throw std::length_error("max_orthogonal_family is exact for at most 64 candidates; heuristic mode is out of scope");
  std::vector<Mask> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && zero_set_member(z, candidates[i] - candidates[j])) adj[i] |= 1ULL << j;
  std::vector<Rational> out;
  for (std::size_t i : max_clique(adj)) out.push_back(candidates[i]);
  return out;
}

std::vector<Point> max_orthogonal_family(const FourierTransform& ft, std::span<const Point> candidates, double tol) {
  const std::size_t n = candidates.size();
  if (n > 64) throw std::length_error("max_orthogonal_family is exact for at most 64 candidates; heuristic mode is out of scope");
  std::vector<Mask> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto d = to_double(candidates[i] - candidates[j]);
      if (std::abs(ft(d).value) <= tol) adj[i] |= 1ULL << j;
    }
  std::vector<Point> out;
  for (std::size_t i : max_clique(adj)) out.push_back(candidates[i]);
  return out;
}

Discreteness uniform_discreteness(const SpectrumEnumeration& e) {
  if (e.collision_count > 0) throw std::invalid_argument("uniform_discreteness: enumeration has collisions");
  Discreteness out{Rational(0), std::numeric_limits<double>::infinity()};
  const auto& pts = e.points;
  if (pts.size() < 2) return out;
  bool have = false;
  auto consider = [&](const Point& a, const Point& b) {
    const Point d = a - b;
    const Rational s = dot(d, d);
    if (!have || s < out.min_distance_sq) {
      out.min_distance_sq = s;
      have = true;
    }
  };
  if (e.dim == 1) {
    std::vector<Rational> v;
    for (const auto& p : pts) v.push_back(p.lambda[0]);
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) consider(Point{v[i]}, Point{v[i - 1]});
  } else {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) consider(pts[i].lambda, pts[j].lambda);
  }
  out.min_distance = std::sqrt(out.min_distance_sq.get_d());
  return out;
}

std::vector<HardyComponent> hardy_embedding(const AffineSystem& sys, const SpectrumEnumeration& e,
                                            std::span<const std::complex<double>> coeffs, int n) {
  if (e.collision_count > 0) throw std::invalid_argument("hardy_embedding: digit uniqueness fails (collisions)");
  if (coeffs.size() != e.points.size()) throw std::invalid_argument("hardy_embedding: one coefficient per point");
  if (n < 0) throw std::invalid_argument("hardy_embedding: split depth must be nonnegative");
  const std::size_t zero = *sys.zero_index_L();
  const std::size_t N = sys.size();
  std::size_t count = 1;
  for (int k = 0; k < n; ++k) count *= N;
  std::vector<HardyComponent> comps(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t rem = c;
    comps[c].prefix.digits.resize(static_cast<std::size_t>(n));
    for (int k = n; k-- > 0;) {
      comps[c].prefix.digits[static_cast<std::size_t>(k)] = rem % N;
      rem /= N;
    }
  }
  RationalMatrix shrink = RationalMatrix::identity(sys.dim());
  for (int k = 0; k < n; ++k) shrink = shrink * sys.R().adjoint_inverse();
  for (std::size_t i = 0; i < e.points.size(); ++i) {
    const auto& w = e.points[i].word.digits;
    std::size_t idx = 0;
    DigitWord prefix;
    for (int k = 0; k < n; ++k) {
      const std::size_t d = static_cast<std::size_t>(k) < w.size() ? w[static_cast<std::size_t>(k)] : zero;
      prefix.digits.push_back(d);
      idx = idx * N + d;
    }
    const Point tail = shrink * (e.points[i].lambda - point_of(sys, prefix));
    comps[idx].coefficients.emplace_back(tail, coeffs[i]);
  }
  return comps;
}

ProjectionCheck projection_norm_checks(const ConvolutionMeasure& measure, const AffineSystem& spectrum_sys,
                                       std::size_t j, int order, int p_depth, double fd_step, int quadrature_depth) {
  if (order != 1 && order != 2) throw std::invalid_argument("projection_norm_checks: order must be 1 or 2");
  const std::size_t nu = measure.dim();
  if (j >= nu || spectrum_sys.dim() != nu) throw std::invalid_argument("projection_norm_checks: bad coordinate");
  const FourierTransform ft = measure.transform(1e-14);
  const auto pset = enumerate_P(spectrum_sys, p_depth);
  const auto levels = static_cast<std::size_t>(p_depth);
  auto q_at = [&](double h) {
    std::vector<double> t(nu, 0.0);
    t[j] = h;
    return q1_at(ft, pset, t, levels);
  };
  const double q0 = q_at(0.0);
  auto diff = [&](double h) {
    if (order == 1) return (q_at(h) - q_at(-h)) / (2 * h);
    return (q_at(h) - 2 * q0 + q_at(-h)) / (h * h);
  };
  ProjectionCheck r;
  r.order = order;
  r.coordinate = j;
  r.fd_raw = diff(fd_step);
  r.fd_derivative = (4 * diff(fd_step / 2) - r.fd_raw) / 3;
  if (order == 1) {
    r.projection_side = 0;
    r.relative_discrepancy = std::abs(r.fd_derivative);
    return r;
  }
  r.norm_x_sq = measure.coordinate_second_moment(j).get_d();
  double s = 0;
  for (std::size_t i = 0; i < pset.points.size(); ++i) {
    const std::span<const double> lam(pset.lambda_real.data() + i * nu, nu);
    s += std::norm(measure.coordinate_inner_product(j, lam, quadrature_depth));
  }
  r.norm_Ax_sq = s;
  const double eight_pi_sq = 8 * std::numbers::pi * std::numbers::pi;
  r.projection_side = eight_pi_sq * (r.norm_Ax_sq - r.norm_x_sq);
  const double scale = std::max({std::abs(r.projection_side), std::abs(r.fd_derivative), 1e-300});
  r.relative_discrepancy = std::abs(r.fd_derivative - r.projection_side) / scale;
  return r;
}

}  // namespace selfaffine
