#pragma once

#include <json.hpp>

#include <array>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lyapscope/types.hpp"

namespace lyap {

enum class DomainKind { torus, plane_region };

struct Rect {
  double umin = 0, umax = 0, vmin = 0, vmax = 0;
  bool contains(const Vec2& p) const {
    return p.x() >= umin && p.x() <= umax && p.y() >= vmin && p.y() <= vmax;
  }
};

using Hessians = std::array<Mat2, 2>;  // Hessians[c](i,j) = d^2 F_c / dx_i dx_j

namespace detail {

// Periodic displacement profile used by the shear perturbations. The 1/(2pi)
// scaling keeps |s'| <= 1 so the shear amplitude is the C^1 size directly.
inline double bump(double t) { return std::sin(2.0 * pi * t) / (2.0 * pi); }
inline double bump1(double t) { return std::cos(2.0 * pi * t); }
inline double bump2(double t) { return -2.0 * pi * std::sin(2.0 * pi * t); }

// Elementary building blocks for torus diffeomorphisms. Each commutes with
// integer translations, so compositions descend to the torus.
struct Elementary {
  enum class Tag { linear, translation, shear_u, shear_v };
  Tag tag;
  Mat2 a = Mat2::Identity();  // linear
  Vec2 t{0.0, 0.0};           // translation
  double amp = 0.0;           // shear amplitude

  Vec2 eval(const Vec2& x) const {
    switch (tag) {
      case Tag::linear: return a * x;
      case Tag::translation: return x + t;
      case Tag::shear_u: return {x.x() + amp * bump(x.y()), x.y()};
      case Tag::shear_v: return {x.x(), x.y() + amp * bump(x.x())};
    }
    return x;
  }

  Mat2 jac(const Vec2& x) const {
    Mat2 j = Mat2::Identity();
    switch (tag) {
      case Tag::linear: return a;
      case Tag::translation: return j;
      case Tag::shear_u: j(0, 1) = amp * bump1(x.y()); return j;
      case Tag::shear_v: j(1, 0) = amp * bump1(x.x()); return j;
    }
    return j;
  }

  Hessians hess(const Vec2& x) const {
    Hessians h{Mat2::Zero(), Mat2::Zero()};
    if (tag == Tag::shear_u) h[0](1, 1) = amp * bump2(x.y());
    if (tag == Tag::shear_v) h[1](0, 0) = amp * bump2(x.x());
    return h;
  }

  Elementary inverted() const {
    Elementary e = *this;
    switch (tag) {
      case Tag::linear: e.a = a.inverse(); break;
      case Tag::translation: e.t = -t; break;
      case Tag::shear_u:
      case Tag::shear_v: e.amp = -amp; break;
    }
    return e;
  }
};

struct EvalResult {
  Vec2 y;
  Mat2 jac;
  Hessians hess;
};

// Chain rule through a list of elementary maps (applied front to back).
inline EvalResult chain(const std::vector<Elementary>& steps, const Vec2& x0, bool want_hess) {
  EvalResult r{x0, Mat2::Identity(), {Mat2::Zero(), Mat2::Zero()}};
  for (const auto& s : steps) {
    const Mat2 dg = s.jac(r.y);
    if (want_hess) {
      const Hessians hg = s.hess(r.y);
      Hessians hn;
      for (int c = 0; c < 2; ++c) {
        hn[c] = r.jac.transpose() * hg[c] * r.jac + dg(c, 0) * r.hess[0] + dg(c, 1) * r.hess[1];
      }
      r.hess = hn;
    }
    r.jac = dg * r.jac;
    r.y = s.eval(r.y);
  }
  return r;
}

}  // namespace detail

class SurfaceMap;

struct MapImpl {
  virtual ~MapImpl() = default;
  virtual Vec2 eval_raw(const Vec2& x) const = 0;
  virtual Mat2 jacobian(const Vec2& x) const = 0;
  virtual Hessians second_derivative(const Vec2& x) const = 0;
  virtual std::shared_ptr<const MapImpl> inverse() const = 0;
  virtual DomainKind domain() const = 0;
  virtual Rect trap() const { return {}; }
  virtual std::string kind() const = 0;
  virtual std::vector<double> params() const = 0;
  virtual bool inverted() const { return false; }
};

namespace detail {

struct TorusMapImpl : MapImpl {
  std::vector<Elementary> steps;
  std::string kind_name;
  std::vector<double> param_list;
  bool is_inverted = false;

  Vec2 eval_raw(const Vec2& x) const override {
    Vec2 y = x;
    for (const auto& s : steps) y = s.eval(y);
    return y;
  }
  Mat2 jacobian(const Vec2& x) const override { return chain(steps, x, false).jac; }
  Hessians second_derivative(const Vec2& x) const override { return chain(steps, x, true).hess; }
  std::shared_ptr<const MapImpl> inverse() const override {
    auto inv = std::make_shared<TorusMapImpl>();
    inv->steps.reserve(steps.size());
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) inv->steps.push_back(it->inverted());
    inv->kind_name = kind_name;
    inv->param_list = param_list;
    inv->is_inverted = !is_inverted;
    return inv;
  }
  DomainKind domain() const override { return DomainKind::torus; }
  std::string kind() const override { return kind_name; }
  std::vector<double> params() const override { return param_list; }
  bool inverted() const override { return is_inverted; }
};

struct HenonImpl : MapImpl {
  double a = 1.4, b = 0.3;
  Rect rect{-1.8, 1.8, -0.6, 0.6};
  bool is_inverted = false;

  Vec2 eval_raw(const Vec2& p) const override {
    if (!is_inverted) return {1.0 + p.y() - a * p.x() * p.x(), b * p.x()};
    const double x = p.y() / b;
    return {x, p.x() - 1.0 + a * x * x};
  }
  Mat2 jacobian(const Vec2& p) const override {
    Mat2 j;
    if (!is_inverted) {
      j << -2.0 * a * p.x(), 1.0, b, 0.0;
    } else {
      j << 0.0, 1.0 / b, 1.0, 2.0 * a * p.y() / (b * b);
    }
    return j;
  }
  Hessians second_derivative(const Vec2&) const override {
    Hessians h{Mat2::Zero(), Mat2::Zero()};
    if (!is_inverted) {
      h[0](0, 0) = -2.0 * a;
    } else {
      h[1](1, 1) = 2.0 * a / (b * b);
    }
    return h;
  }
  std::shared_ptr<const MapImpl> inverse() const override {
    auto inv = std::make_shared<HenonImpl>(*this);
    inv->is_inverted = !is_inverted;
    return inv;
  }
  DomainKind domain() const override { return DomainKind::plane_region; }
  Rect trap() const override { return rect; }
  std::string kind() const override { return "henon-like"; }
  std::vector<double> params() const override {
    return {a, b, rect.umin, rect.umax, rect.vmin, rect.vmax};
  }
  bool inverted() const override { return is_inverted; }
};

}  // namespace detail

// A 2D diffeomorphism from the zoo, with analytic first and second
// derivatives and an exact inverse. Value type; cheap to copy.
class SurfaceMap {
 public:
  SurfaceMap() : SurfaceMap(identity()) {}

  static SurfaceMap identity() {
    auto impl = std::make_shared<detail::TorusMapImpl>();
    impl->kind_name = "identity";
    return SurfaceMap(std::move(impl));
  }

  static SurfaceMap rotation(double au, double av) {
    auto impl = std::make_shared<detail::TorusMapImpl>();
    detail::Elementary e{detail::Elementary::Tag::translation};
    e.t = {au, av};
    impl->steps.push_back(e);
    impl->kind_name = "rotation";
    impl->param_list = {au, av};
    return SurfaceMap(std::move(impl));
  }

  static SurfaceMap torus_linear(const Mat2& a) {
    if (std::fabs(a.determinant()) < 1e-14) throw InvalidArgument("torus_linear: singular matrix");
    auto impl = std::make_shared<detail::TorusMapImpl>();
    detail::Elementary e{detail::Elementary::Tag::linear};
    e.a = a;
    impl->steps.push_back(e);
    impl->kind_name = "torus-linear";
    impl->param_list = {a(0, 0), a(0, 1), a(1, 0), a(1, 1)};
    return SurfaceMap(std::move(impl));
  }

  static SurfaceMap cat() {
    Mat2 a;
    a << 2, 1, 1, 1;
    return torus_linear(a);
  }

  // A o shear_v(d2) o shear_u(d1): area-preserving whenever |det A| = 1.
  static SurfaceMap perturbed_torus(const Mat2& a, double d1, double d2) {
    auto impl = std::make_shared<detail::TorusMapImpl>();
    detail::Elementary s1{detail::Elementary::Tag::shear_u};
    s1.amp = d1;
    detail::Elementary s2{detail::Elementary::Tag::shear_v};
    s2.amp = d2;
    detail::Elementary lin{detail::Elementary::Tag::linear};
    lin.a = a;
    impl->steps = {s1, s2, lin};
    impl->kind_name = "perturbed-torus";
    impl->param_list = {a(0, 0), a(0, 1), a(1, 0), a(1, 1), d1, d2};
    return SurfaceMap(std::move(impl));
  }

  static SurfaceMap perturbed_cat(double d1, double d2) {
    Mat2 a;
    a << 2, 1, 1, 1;
    return perturbed_torus(a, d1, d2);
  }

  static SurfaceMap henon(double a = 1.4, double b = 0.3,
                          Rect rect = Rect{-1.8, 1.8, -0.6, 0.6}) {
    if (b == 0.0) throw InvalidArgument("henon: b must be nonzero");
    auto impl = std::make_shared<detail::HenonImpl>();
    impl->a = a;
    impl->b = b;
    impl->rect = rect;
    return SurfaceMap(std::move(impl));
  }

  DomainKind domain() const { return impl_->domain(); }
  Rect trap() const { return impl_->trap(); }

  // Image point; torus coordinates are normalized to [0,1)^2.
  Vec2 apply(const Vec2& x) const {
    check_domain(x);
    Vec2 y = impl_->eval_raw(x);
    return domain() == DomainKind::torus ? wrap_torus(y) : y;
  }

  // Unwrapped image (the lift to R^2 for torus maps); used when sampling
  // curves, where continuity across the fundamental domain matters.
  Vec2 apply_raw(const Vec2& x) const { return impl_->eval_raw(x); }

  Mat2 jacobian(const Vec2& x) const { return impl_->jacobian(x); }
  Hessians second_derivative(const Vec2& x) const { return impl_->second_derivative(x); }

  SurfaceMap inverse() const { return SurfaceMap(impl_->inverse()); }

  double dist(const Vec2& a, const Vec2& b) const {
    return domain() == DomainKind::torus ? torus_dist(a, b) : plane_dist(a, b);
  }
  double dist(const ProjPoint& a, const ProjPoint& b) const {
    return domain() == DomainKind::torus ? bundle_dist_torus(a, b) : bundle_dist_plane(a, b);
  }

  std::string kind() const { return impl_->kind(); }
  std::vector<double> params() const { return impl_->params(); }
  bool inverted() const { return impl_->inverted(); }

  std::string id() const {
    std::ostringstream os;
    if (impl_->inverted()) os << "inv:";
    os << impl_->kind();
    const auto p = impl_->params();
    if (!p.empty()) {
      os << "(";
      for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
      os << ")";
    }
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kind"] = impl_->kind();
    j["params"] = impl_->params();
    if (impl_->inverted()) j["inverted"] = true;
    return j;
  }

  static SurfaceMap from_json(const nlohmann::json& j) {
    if (!j.contains("kind")) throw ConfigError("map config: missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    std::vector<double> p;
    if (j.contains("params")) p = j.at("params").get<std::vector<double>>();
    SurfaceMap m = make(kind, p);
    if (j.value("inverted", false)) m = m.inverse();
    return m;
  }

  static SurfaceMap make(const std::string& kind, const std::vector<double>& p) {
    auto need = [&](std::size_t n) {
      if (p.size() != n)
        throw ConfigError("map config: kind '" + kind + "' expects " + std::to_string(n) +
                          " params, got " + std::to_string(p.size()));
    };
    if (kind == "identity") {
      need(0);
      return identity();
    }
    if (kind == "rotation") {
      need(2);
      return rotation(p[0], p[1]);
    }
    if (kind == "torus-linear") {
      need(4);
      Mat2 a;
      a << p[0], p[1], p[2], p[3];
      return torus_linear(a);
    }
    if (kind == "perturbed-torus") {
      need(6);
      Mat2 a;
      a << p[0], p[1], p[2], p[3];
      return perturbed_torus(a, p[4], p[5]);
    }
    if (kind == "henon-like") {
      if (p.size() == 2) return henon(p[0], p[1]);
      need(6);
      return henon(p[0], p[1], Rect{p[2], p[3], p[4], p[5]});
    }
    throw ConfigError("map config: unknown kind '" + kind + "'");
  }

 private:
  explicit SurfaceMap(std::shared_ptr<const MapImpl> impl) : impl_(std::move(impl)) {}

  void check_domain(const Vec2& x) const {
    if (domain() == DomainKind::plane_region && !impl_->trap().contains(x)) {
      std::ostringstream os;
      os << "orbit escaped declared region of " << id() << " at (" << x.x() << ", " << x.y()
         << ")";
      throw NumericError(os.str());
    }
  }

  std::shared_ptr<const MapImpl> impl_;
};

// Family f_k -> f: the limit composed with shear displacements scaled by 1/k,
// so members converge uniformly with C^2 size O(1/k).
class MapFamily {
 public:
  MapFamily(const Mat2& limit_linear, double d1, double d2)
      : a_(limit_linear), d1_(d1), d2_(d2) {}

  SurfaceMap limit() const { return SurfaceMap::torus_linear(a_); }
  SurfaceMap member(int k) const {
    if (k < 1) throw InvalidArgument("MapFamily::member: k must be >= 1");
    return SurfaceMap::perturbed_torus(a_, d1_ / k, d2_ / k);
  }

  nlohmann::json to_json() const {
    return {{"kind", "perturbed-torus"},
            {"params", {a_(0, 0), a_(0, 1), a_(1, 0), a_(1, 1), d1_, d2_}}};
  }
  static MapFamily from_json(const nlohmann::json& j) {
    auto p = j.at("params").get<std::vector<double>>();
    if (p.size() != 6) throw ConfigError("family config: expected 6 params");
    Mat2 a;
    a << p[0], p[1], p[2], p[3];
    return MapFamily(a, p[4], p[5]);
  }

 private:
  Mat2 a_;
  double d1_, d2_;
};

}  // namespace lyap
