#include "omnisafe/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace omnisafe {

namespace {

Mat2 rot(double a) {
  Mat2 r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b,
                        Vec2* closest) {
  const Vec2 e = b - a;
  const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
  const Vec2 c = a + t * e;
  if (closest) *closest = c;
  return (p - c).norm();
}

}  // namespace

BodyOutline BodyOutline::triangle(double side) {
  if (!(side > 0)) throw InputError("outline: side must be positive");
  const double r = side / std::sqrt(3.0);
  BodyOutline o;
  for (int i = 0; i < 3; ++i) {
    const double a = 2.0 * kPi * i / 3.0;
    o.vertices.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return o;
}

void BodyOutline::validate() const {
  const std::size_t n = vertices.size();
  if (n < 3) throw InputError("outline: need at least three vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const Vec2& c = vertices[(i + 2) % n];
    if (cross(b - a, c - b) <= 0.0) {
      throw InputError("outline: vertices must be convex and counterclockwise");
    }
  }
}

double BodyOutline::perimeter() const {
  double len = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    len += (vertices[(i + 1) % vertices.size()] - vertices[i]).norm();
  }
  return len;
}

Vec2 BodyOutline::boundary_point(double s) const {
  s -= std::floor(s);
  double target = s * perimeter();
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const double len = (b - a).norm();
    if (target <= len || i + 1 == n) {
      return a + (b - a) * std::min(target / len, 1.0);
    }
    target -= len;
  }
  return vertices.front();
}

Vec2 BodyOutline::outward_normal_at(const Vec2& p) const {
  const std::size_t n = vertices.size();
  double best = std::numeric_limits<double>::infinity();
  Vec2 normal = Vec2::UnitX();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const double d = segment_distance(p, a, b, nullptr);
    if (d < best) {
      best = d;
      const Vec2 e = (b - a).normalized();
      normal = Vec2(e.y(), -e.x());
    }
  }
  return normal;
}

Vec2 BodyOutline::nearest_boundary_point(const Vec2& p) const {
  const std::size_t n = vertices.size();
  double best = std::numeric_limits<double>::infinity();
  Vec2 out = vertices.front();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 c;
    const double d = segment_distance(p, vertices[i], vertices[(i + 1) % n], &c);
    if (d < best) {
      best = d;
      out = c;
    }
  }
  return out;
}

Vec3 nominal_torque(const BaseParams& p, const RollerFrictionParams& friction,
                    const BaseState& s, const Vec3& xdd, const Vec3& qw_dd,
                    const Vec3& qr_dd, const SlopeSpec& slope) {
  const BaseJacobians j = base_jacobians(p, s.pose(2));
  const Vec3 mb(p.mass, p.mass, p.body_inertia);
  const Vec3 roller =
      p.roller_inertia * qr_dd + roller_friction(friction, s.qr_dot);
  const Vec3 body = mb.cwiseProduct(xdd) + gravity_vector(p, slope).head<3>() +
                    j.Jcr.transpose() * roller;
  return j.Jcw.transpose().lu().solve(body) + p.wheel_inertia * qw_dd;
}

Vec3 estimate_wrench(const Vec3& t_nominal, const Vec3& t_sensed, double theta,
                     const BaseParams& p) {
  return base_jacobians(p, theta).Jcw.transpose() * (t_nominal - t_sensed);
}

double row3_moment(const BaseParams& p, double theta_dd, const Vec3& qw_dd,
                   const Vec3& t_sensed) {
  const double k = p.wheel_center_radius / p.wheel_radius;
  return p.body_inertia * theta_dd + p.wheel_inertia * k * qw_dd.sum() -
         k * t_sensed.sum();
}

ContactPoint locate_contact(const Vec3& wrench, const BodyOutline& outline,
                            double theta, const LocateOptions& opt) {
  outline.validate();
  const Vec2 f = rot(-theta) * wrench.head<2>();
  const double mag = f.norm();
  if (!(mag > opt.force_floor)) {
    throw NumericalError("locate_contact: force below floor, direction undefined");
  }
  const Vec2 d = f / mag;
  const Vec2 p0 = (wrench(2) / mag) * Vec2(d.y(), -d.x());

  double t_in = -std::numeric_limits<double>::infinity();
  double t_out = std::numeric_limits<double>::infinity();
  bool parallel_outside = false;
  const std::size_t n = outline.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = outline.vertices[i];
    const Vec2 e = outline.vertices[(i + 1) % n] - a;
    const Vec2 nrm = Vec2(e.y(), -e.x()).normalized();
    const double nd = nrm.dot(d);
    const double gap = nrm.dot(a - p0);
    if (std::abs(nd) < 1e-15) {
      if (gap < -opt.vertex_snap) parallel_outside = true;
      continue;
    }
    const double t = gap / nd;
    if (nd < 0) t_in = std::max(t_in, t);
    else t_out = std::min(t_out, t);
  }

  ContactPoint cp;
  cp.direction = d;
  cp.magnitude = mag;
  const bool miss = parallel_outside || t_in > t_out + opt.vertex_snap;
  if (miss) {
    if (opt.on_miss == MissPolicy::kError) {
      throw NoContactPoint("locate_contact: zero-moment line misses the outline");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& v : outline.vertices) {
      const double dist = std::abs(cross(d, v - p0));
      if (dist < best) {
        best = dist;
        cp.point = v;
      }
    }
    cp.on_miss_projected = true;
    return cp;
  }
  if (t_out - t_in <= opt.vertex_snap) {
    const Vec2 mid = p0 + 0.5 * (t_in + t_out) * d;
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& v : outline.vertices) {
      if ((v - mid).norm() < best) {
        best = (v - mid).norm();
        cp.point = v;
      }
    }
    cp.snapped_to_vertex = true;
    return cp;
  }
  cp.point = p0 + t_in * d;
  return cp;
}

Vec3 boundary_push_wrench(const Vec2& point_body, const Vec2& force_body,
                          double theta) {
  const Mat2 r = rot(theta);
  const Vec2 f = r * force_body;
  const Vec2 arm = r * point_body;
  return Vec3(f.x(), f.y(), cross(arm, f));
}

CollisionDetector::CollisionDetector(std::size_t window, double threshold)
    : window_(window), threshold_(threshold) {
  if (window == 0) throw InputError("detector: window must be >= 1");
  if (!(threshold > 0)) throw InputError("detector: threshold must be positive");
}

bool CollisionDetector::push(double force_magnitude) {
  buf_.push_back(std::abs(force_magnitude));
  if (buf_.size() > window_) buf_.pop_front();
  sum_ = 0.0;
  for (double v : buf_) sum_ += v;
  const std::size_t idx = count_++;
  if (!fired_ && mean() > threshold_) {
    fired_ = true;
    onset_ = idx;
    return true;
  }
  return false;
}

void CollisionDetector::reset() {
  buf_.clear();
  sum_ = 0.0;
  count_ = 0;
  fired_ = false;
  onset_.reset();
}

std::optional<std::size_t> detect_collision(const std::vector<double>& stream,
                                            std::size_t window,
                                            double threshold) {
  CollisionDetector det(window, threshold);
  for (double v : stream) {
    if (det.push(v)) return det.onset();
  }
  return std::nullopt;
}

MatX contact_map(const std::vector<Vec2>& locations) {
  MatX h = MatX::Zero(3, 2 * static_cast<int>(locations.size()));
  for (std::size_t i = 0; i < locations.size(); ++i) {
    const int c = 2 * static_cast<int>(i);
    h(0, c) = 1.0;
    h(1, c + 1) = 1.0;
    h(2, c) = -locations[i].y();
    h(2, c + 1) = locations[i].x();
  }
  return h;
}

std::vector<Vec2> multicontact_estimate(const MulticontactProblem& problem) {
  if (problem.locations.empty()) {
    throw InputError("multicontact: need at least one contact");
  }
  MatX h = contact_map(problem.locations);
  VecX rhs = problem.net;
  if (problem.first_direction) {
    const Vec2 u = problem.first_direction->normalized();
    MatX hp = MatX::Zero(4, h.cols());
    hp.topRows<3>() = h;
    hp(3, 0) = u.y();
    hp(3, 1) = -u.x();
    h = hp;
    rhs.conservativeResize(4);
    rhs(3) = 0.0;
  }
  const VecX f = h.transpose() * (pinv(h * h.transpose()) * rhs);
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < problem.locations.size(); ++i) {
    out.emplace_back(f(2 * i), f(2 * i + 1));
  }
  return out;
}

bool wall_detect(const Vec2& planned, const Vec2& measured,
                 double err_threshold) {
  return (measured - planned).norm() >= err_threshold;
}

WallFit fit_wall(const std::vector<Vec2>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw InputError("fit_wall: need at least two points");
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (const Vec2& p : points) {
    sx += p.x();
    sy += p.y();
    sxy += p.x() * p.y();
    sxx += p.x() * p.x();
    syy += p.y() * p.y();
  }
  const double nn = static_cast<double>(n);
  const double den = nn * sxx - sx * sx;
  const double num = nn * sxy - sx * sy;
  const double spread = den + (nn * syy - sy * sy);
  WallFit w;
  w.points = n;
  if (!(spread > 0)) throw InputError("fit_wall: points are coincident");
  if (den <= 1e-9 * spread) {
    w.vertical = true;
    w.angle = 0.5 * std::atan2(2.0 * num, den - (nn * syy - sy * sy));
    if (w.angle <= -kPi / 2.0) w.angle += kPi;
    w.slope = std::numeric_limits<double>::infinity();
    return w;
  }
  w.slope = num / den;
  w.angle = std::atan(w.slope);
  return w;
}

bool WallEstimator::update(const Vec2& planned, const Vec2& measured) {
  active_ = wall_detect(planned, measured, err_threshold_);
  if (active_) points_.push_back(measured);
  return active_;
}

std::optional<WallFit> WallEstimator::fit() const {
  if (points_.size() < 2) return std::nullopt;
  return fit_wall(points_);
}

BodyPart parse_body_part(const std::string& s) {
  if (s == "left_hand" || s == "left") return BodyPart::kLeftHand;
  if (s == "right_hand" || s == "right") return BodyPart::kRightHand;
  if (s == "body") return BodyPart::kBody;
  throw InputError("unknown body part '" + s + "'");
}

std::string to_string(BodyPart p) {
  switch (p) {
    case BodyPart::kLeftHand: return "left_hand";
    case BodyPart::kRightHand: return "right_hand";
    case BodyPart::kBody: return "body";
  }
  return "body";
}

CommandSet CommandSet::table() {
  using P = BodyPart;
  CommandSet s;
  s.commands = {
      {"Collide", {{P::kBody, {0.0, 0.0}, {5.0, 0.0}}}},
      {"Push", {{P::kRightHand, {0.0, -0.3}, {5.0, 0.0}}}},
      {"Pull", {{P::kRightHand, {0.0, -0.3}, {-5.0, 0.0}}}},
      {"Rotate",
       {{P::kLeftHand, {0.0, -0.3}, {5.0, 0.0}},
        {P::kRightHand, {0.0, 0.3}, {-5.0, 0.0}}}},
  };
  return s;
}

void CommandSet::validate() const {
  if (!(w_l >= 0 && w_f >= 0)) throw InputError("commands: weights must be >= 0");
  if (!(trigger > 0)) throw InputError("commands: trigger must be positive");
}

namespace {

const Touch* find_part(const std::vector<Touch>& ts, BodyPart part) {
  const Touch* hit = nullptr;
  for (const Touch& t : ts) {
    if (t.part != part) continue;
    if (hit) throw InputError("touch set repeats body part " + to_string(part));
    hit = &t;
  }
  return hit;
}

}  // namespace

double command_score(const std::vector<Touch>& touches, const Command& c,
                     double w_l, double w_f) {
  double score = 0.0;
  for (BodyPart part : {BodyPart::kLeftHand, BodyPart::kRightHand, BodyPart::kBody}) {
    const Touch* e = find_part(touches, part);
    const Touch* t = find_part(c.triggers, part);
    if (!e && !t) continue;
    if (!e || !t) return std::numeric_limits<double>::infinity();
    score += w_l * (e->location - t->location).norm() +
             w_f * (e->force - t->force).norm();
  }
  return score;
}

std::optional<std::string> match_command(const std::vector<Touch>& touches,
                                         const CommandSet& set) {
  set.validate();
  double fmax = 0.0;
  for (const Touch& t : touches) fmax = std::max(fmax, t.force.norm());
  if (touches.empty() || fmax < set.trigger) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::string> out;
  for (const Command& c : set.commands) {
    const double s = command_score(touches, c, set.w_l, set.w_f);
    if (s < best) {
      best = s;
      out = c.name;
    }
  }
  return out;
}

Vec3 StictionModel::sample(Engine& rng) const {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vec3(u(rng), u(rng), u(rng));
}

Vec3 StictionModel::attenuate(const Vec3& t_nominal, const Vec3& t_sensed,
                              const Vec3& factors) const {
  return t_nominal - factors.cwiseProduct(t_nominal - t_sensed);
}

}  // namespace omnisafe
