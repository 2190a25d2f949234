#include "selfaffine/attractor_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace selfaffine {

MapSide parse_side(std::string_view s) {
  if (s == "sigma") return MapSide::sigma;
  if (s == "rho") return MapSide::rho;
  if (s == "tau") return MapSide::tau;
  if (s == "omega") return MapSide::omega;
  throw std::invalid_argument("unknown side \"" + std::string(s) + "\" (sigma|rho|tau|omega)");
}

std::string to_string(MapSide side) {
  switch (side) {
    case MapSide::sigma: return "sigma";
    case MapSide::rho: return "rho";
    case MapSide::tau: return "tau";
    case MapSide::omega: return "omega";
  }
  return "?";
}

namespace {

void sort_unique(std::vector<Point>& pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

Point apply_side(const AffineSystem& sys, MapSide side, std::size_t d, const Point& x) {
  switch (side) {
    case MapSide::sigma: return sys.R().inverse() * x + sys.B()[d];
    case MapSide::rho: return sys.R().adjoint_inverse() * (x - sys.L()[d]);
    case MapSide::tau: return sys.R().adjoint() * x + sys.L()[d];
    case MapSide::omega: return sys.R().matrix() * (x - sys.B()[d]);
  }
  throw std::logic_error("bad side");
}

}  // namespace

AttractorSample orbit_points(const AffineSystem& sys, MapSide side, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  std::vector<Point> level{Point(sys.dim(), Rational(0))};
  for (int k = 0; k < depth; ++k) {
    std::vector<Point> next;
    next.reserve(level.size() * sys.size());
    for (const auto& s : level)
      for (std::size_t d = 0; d < sys.size(); ++d) next.push_back(apply_side(sys, side, d, s));
    sort_unique(next);
    level = std::move(next);
  }
  return {side, depth, std::move(level)};
}

AttractorSample attractor_points(const AffineSystem& sys, MapSide side, int depth) {
  if (side == MapSide::tau || side == MapSide::omega) return orbit_points(sys, side, depth);
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  // Contractions x -> A x + c_d. The depth-n composition has linear part A^n and
  // translation c_{w1} + A c_{w2} + ... + A^{n-1} c_{wn}.
  const RationalMatrix& a = side == MapSide::sigma ? sys.R().inverse() : sys.R().adjoint_inverse();
  std::vector<Point> c;
  for (std::size_t d = 0; d < sys.size(); ++d) {
    c.push_back(side == MapSide::sigma ? sys.B()[d] : Point(a * sys.L()[d]));
    if (side == MapSide::rho) c.back() = Rational(-1) * c.back();
  }
  std::vector<Point> trans = c;
  RationalMatrix power = a;
  for (int k = 1; k < depth; ++k) {
    std::vector<Point> next;
    next.reserve(trans.size() * c.size());
    for (const auto& cd : c)
      for (const auto& s : trans) next.push_back(cd + a * s);
    trans = std::move(next);
    power = power * a;
  }
  const RationalMatrix lhs = RationalMatrix::identity(sys.dim()) - power;
  RationalMatrix inv;
  try {
    inv = lhs.inverse();
  } catch (const std::domain_error&) {
    throw std::domain_error("I - M_w is singular: system is not expansive");
  }
  std::vector<Point> pts;
  pts.reserve(trans.size());
  for (const auto& s : trans) pts.push_back(inv * s);
  sort_unique(pts);
  return {side, depth, std::move(pts)};
}

// ---- hulls ----

namespace {

RationalVector cross(const RationalVector& u, const RationalVector& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

Rational cross2(const RationalVector& o, const RationalVector& a, const RationalVector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Scales a nonzero normal so its first nonzero entry has magnitude 1.
RationalVector canonical(RationalVector n) {
  for (const auto& q : n) {
    if (q != 0) {
      const Rational s = 1 / abs(q);
      for (auto& x : n) x *= s;
      break;
    }
  }
  return n;
}

struct HullResult {
  std::vector<std::size_t> vertices;  // indices into the local point list
  std::vector<Facet> facets;
  Rational volume;
};

HullResult hull_1d(const std::vector<RationalVector>& p) {
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i][0] < p[lo][0]) lo = i;
    if (p[i][0] > p[hi][0]) hi = i;
  }
  HullResult r;
  r.vertices = {lo, hi};
  r.facets = {{RationalVector{Rational(-1)}, -p[lo][0]}, {RationalVector{Rational(1)}, p[hi][0]}};
  r.volume = p[hi][0] - p[lo][0];
  return r;
}

HullResult hull_2d(const std::vector<RationalVector>& p) {
  std::vector<std::size_t> idx(p.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i : idx) {
    while (k >= 2 && cross2(p[h[k - 2]], p[h[k - 1]], p[i]) <= 0) --k;
    h[k++] = i;
  }
  for (std::size_t j = idx.size() - 1, t = k + 1; j-- > 0;) {
    const std::size_t i = idx[j];
    while (k >= t && cross2(p[h[k - 2]], p[h[k - 1]], p[i]) <= 0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);  // counter-clockwise, last equals first
  HullResult r;
  r.vertices = h;
  Rational area2 = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& a = p[h[i]];
    const auto& b = p[h[(i + 1) % h.size()]];
    area2 += a[0] * b[1] - a[1] * b[0];
    RationalVector n{b[1] - a[1], a[0] - b[0]};
    n = canonical(n);
    r.facets.push_back({n, dot(n, a)});
  }
  r.volume = area2 / 2;
  return r;
}

HullResult hull_3d(const std::vector<RationalVector>& p) {
  struct Face {
    std::size_t a, b, c;
  };
  auto orient = [&](const Face& f, const RationalVector& d) {
    return dot(cross(p[f.b] - p[f.a], p[f.c] - p[f.a]), d - p[f.a]);
  };
  // Initial tetrahedron.
  const std::size_t i0 = 0;
  std::size_t i1 = 1;
  while (p[i1] == p[i0]) ++i1;
  std::size_t i2 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!is_zero(cross(p[i1] - p[i0], p[i] - p[i0]))) {
      i2 = i;
      break;
    }
  }
  std::size_t i3 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (orient({i0, i1, i2}, p[i]) != 0) {
      i3 = i;
      break;
    }
  }
  RationalVector centroid = Rational(1, 4) * (p[i0] + p[i1] + p[i2] + p[i3]);
  std::vector<Face> faces;
  for (Face f : {Face{i0, i1, i2}, Face{i0, i1, i3}, Face{i0, i2, i3}, Face{i1, i2, i3}}) {
    if (orient(f, centroid) > 0) std::swap(f.b, f.c);
    faces.push_back(f);
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    std::vector<bool> visible(faces.size());
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      visible[f] = orient(faces[f], p[i]) > 0;
      any = any || visible[f];
    }
    if (!any) continue;
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      edges.insert({faces[f].a, faces[f].b});
      edges.insert({faces[f].b, faces[f].c});
      edges.insert({faces[f].c, faces[f].a});
    }
    std::vector<Face> kept;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (!visible[f]) kept.push_back(faces[f]);
    for (const auto& [u, v] : edges) {
      if (!edges.count({v, u})) kept.push_back({u, v, i});
    }
    faces = std::move(kept);
  }

  HullResult r;
  r.volume = 0;
  std::vector<std::pair<RationalVector, Rational>> planes;
  for (const auto& f : faces) {
    r.volume += orient(f, centroid);
    RationalVector n = canonical(cross(p[f.b] - p[f.a], p[f.c] - p[f.a]));
    Rational off = dot(n, p[f.a]);
    if (std::find(planes.begin(), planes.end(), std::make_pair(n, off)) == planes.end()) planes.emplace_back(n, off);
  }
  r.volume = -r.volume / 6;
  for (const auto& [n, off] : planes) r.facets.push_back({n, off});
  // A boundary point is a vertex iff the facet normals through it have rank 3.
  std::set<std::size_t> used;
  for (const auto& f : faces) used.insert({f.a, f.b, f.c});
  for (std::size_t i : used) {
    std::vector<RationalVector> normals;
    for (const auto& [n, off] : planes)
      if (dot(n, p[i]) == off) normals.push_back(n);
    if (rank_of(normals) == 3) r.vertices.push_back(i);
  }
  return r;
}

}  // namespace

Polytope convex_hull(std::span<const Point> input) {
  if (input.empty()) throw std::invalid_argument("convex_hull of an empty point set");
  const std::size_t nu = input.front().size();
  if (nu > 3) throw std::domain_error("exact hulls are implemented for dimension <= 3 only");
  std::vector<Point> pts(input.begin(), input.end());
  for (const auto& q : pts)
    if (q.size() != nu) throw std::invalid_argument("convex_hull: mixed dimensions");
  sort_unique(pts);

  Polytope poly;
  poly.ambient_ = nu;
  // Affine frame: greedily pick differences that raise the rank.
  std::vector<RationalVector> chosen;
  for (std::size_t i = 1; i < pts.size() && chosen.size() < nu; ++i) {
    chosen.push_back(pts[i] - pts[0]);
    if (rank_of(chosen) < chosen.size()) chosen.pop_back();
  }
  const std::size_t k = chosen.size();
  if (k == nu) {
    poly.origin_ = Point(nu, Rational(0));
    for (std::size_t i = 0; i < nu; ++i) {
      RationalVector e(nu, Rational(0));
      e[i] = 1;
      poly.basis_.push_back(e);
      poly.pivot_rows_.push_back(i);
    }
  } else {
    poly.origin_ = pts[0];
    poly.basis_ = chosen;
    // Pick k rows of the nu x k basis matrix that form an invertible block.
    std::vector<RationalVector> rows;
    for (std::size_t r = 0; r < nu && poly.pivot_rows_.size() < k; ++r) {
      RationalVector row;
      for (const auto& b : chosen) row.push_back(b[r]);
      rows.push_back(row);
      if (rank_of(rows) == rows.size()) {
        poly.pivot_rows_.push_back(r);
      } else {
        rows.pop_back();
      }
    }
  }

  std::vector<RationalVector> local;
  local.reserve(pts.size());
  for (const auto& q : pts) local.push_back(*poly.local_coordinates(q));

  HullResult hr;
  if (k == 0) {
    hr.vertices = {0};
    hr.volume = 0;
  } else if (k == 1) {
    hr = hull_1d(local);
  } else if (k == 2) {
    hr = hull_2d(local);
  } else {
    hr = hull_3d(local);
  }
  for (std::size_t i : hr.vertices) {
    poly.vertices_.push_back(pts[i]);
    poly.local_vertices_.push_back(local[i]);
  }
  poly.facets_ = std::move(hr.facets);
  if (k < nu) hr.volume = 0;
  poly.volume_ = hr.volume;
  return poly;
}

std::optional<RationalVector> Polytope::local_coordinates(const Point& x) const {
  if (x.size() != ambient_) throw std::invalid_argument("local_coordinates: dimension mismatch");
  const std::size_t k = basis_.size();
  if (k == ambient_) return x;
  const RationalVector d = x - origin_;
  RationalMatrix m(k, k);
  RationalVector rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) m(i, j) = basis_[j][pivot_rows_[i]];
    rhs[i] = d[pivot_rows_[i]];
  }
  const RationalVector c = k == 0 ? RationalVector{} : solve(m, rhs);
  RationalVector back = origin_;
  for (std::size_t j = 0; j < k; ++j) back = back + c[j] * basis_[j];
  if (back != x) return std::nullopt;
  return c;
}

bool Polytope::contains(const Point& x) const {
  const auto c = local_coordinates(x);
  if (!c) return false;
  if (basis_.empty()) return true;
  for (const auto& f : facets_)
    if (dot(f.normal, *c) > f.offset) return false;
  return true;
}

bool Polytope::contains_in_interior(const Point& x) const {
  if (!full_dimensional()) return false;
  for (const auto& f : facets_)
    if (dot(f.normal, x) >= f.offset) return false;
  return true;
}

bool Polytope::contains_approx(std::span<const double> x, double tol) const {
  if (x.size() != ambient_) throw std::invalid_argument("contains_approx: dimension mismatch");
  const std::size_t k = basis_.size();
  Eigen::VectorXd c(static_cast<Eigen::Index>(k));
  if (k == ambient_) {
    for (std::size_t i = 0; i < k; ++i) c(i) = x[i];
  } else {
    Eigen::MatrixXd bm(ambient_, k);
    Eigen::VectorXd d(ambient_);
    for (std::size_t r = 0; r < ambient_; ++r) {
      d(r) = x[r] - origin_[r].get_d();
      for (std::size_t j = 0; j < k; ++j) bm(r, j) = basis_[j][r].get_d();
    }
    if (k > 0) c = bm.colPivHouseholderQr().solve(d);
    if ((bm * c - d).norm() > tol) return false;
  }
  for (const auto& f : facets_) {
    double s = 0;
    for (std::size_t j = 0; j < k; ++j) s += f.normal[j].get_d() * c(j);
    if (s > f.offset.get_d() + tol) return false;
  }
  return true;
}

Rational Polytope::volume() const { return volume_; }

double Polytope::diameter() const {
  double best = 0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
      double s = 0;
      for (std::size_t r = 0; r < ambient_; ++r) {
        const double d = Rational(vertices_[i][r] - vertices_[j][r]).get_d();
        s += d * d;
      }
      best = std::max(best, std::sqrt(s));
    }
  return best;
}

Polytope simplex_Y(const AffineSystem& sys) {
  const RationalMatrix& r = sys.R().matrix();
  const std::size_t nu = sys.dim();
  bool scalar = true;
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nu; ++j) scalar = scalar && (i == j ? r(i, j) == r(0, 0) : r(i, j) == 0);
  if (!scalar || r(0, 0) <= 1) {
    throw std::domain_error(
        "simplex_Y needs R = cI with c > 1; use convex_hull of deep rho-side samples (rho_hull) instead");
  }
  const RationalMatrix shift_inv = (sys.R().adjoint() - RationalMatrix::identity(nu)).inverse();
  std::vector<Point> verts{Point(nu, Rational(0))};
  for (const auto& l : sys.L()) {
    if (!is_zero(l)) verts.push_back(Rational(-1) * (shift_inv * l));
  }
  return convex_hull(verts);
}

Polytope simplex_Y(const AffineSystem& sys, long r) {
  if (r < 2) throw std::invalid_argument("simplex_Y: r must be an integer >= 2");
  return simplex_Y(sys.scaled(Rational(r)));
}

Rational hull_volume(const Polytope& p) { return p.volume(); }

InvarianceReport invariance_check(const AffineSystem& sys, const Polytope& p) {
  InvarianceReport rep;
  const Rational ss[] = {Rational(0), Rational(1, 2), Rational(1)};
  for (const auto& v : p.vertices())
    for (std::size_t li = 0; li < sys.size(); ++li)
      for (const auto& s : ss) {
        const Point img = sys.R().adjoint_inverse() * (v - s * sys.L()[li]);
        ++rep.checked;
        if (!p.contains(img)) {
          rep.invariant = false;
          rep.violations.push_back({li, v, s, img});
        }
      }
  return rep;
}

std::optional<double> hausdorff_dimension(const AffineSystem& sys) {
  const RationalMatrix m = sys.R().matrix().transpose() * sys.R().matrix();
  const Rational c = m(0, 0);
  if (!(m == RationalMatrix::identity(sys.dim()) * c) || c <= 1) return std::nullopt;
  return std::log(static_cast<double>(sys.size())) / (0.5 * std::log(c.get_d()));
}

Polytope rho_hull(const AffineSystem& sys, int depth) {
  try {
    return simplex_Y(sys);
  } catch (const std::domain_error&) {
    const auto sample = attractor_points(sys, MapSide::rho, depth);
    return convex_hull(sample.points);
  }
}

}  // namespace selfaffine
