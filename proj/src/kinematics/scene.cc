#include "adl/kinematics/scene.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <tuple>

#include "adl/core/error.h"

namespace adl::kin {
namespace {

// Extra separation added when pushing a pair apart, so resolved pairs rest
// just outside contact instead of oscillating around zero.
constexpr double kSeparationBias = 2e-4;

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = -1.0;  // negative: link has no capsules
};

struct BodyCache {
  std::vector<Transform> frames;
  std::vector<std::vector<Capsule>> capsules;
  std::vector<Sphere> bounds;
};

struct Hit {
  int body_a, link_a, cap_a;
  int body_b, link_b, cap_b;
  CapsuleDistance d;
  double radius_min;
};

using Key = std::tuple<int, int, int, int, int, int>;
Key key_of(const Hit& h) { return {h.body_a, h.link_a, h.cap_a, h.body_b, h.link_b, h.cap_b}; }

Sphere bound(const std::vector<Capsule>& caps) {
  if (caps.empty()) return {};
  Vec3 lo = caps[0].a, hi = caps[0].a;
  for (const Capsule& c : caps) {
    lo = lo.cwiseMin(c.a).cwiseMin(c.b);
    hi = hi.cwiseMax(c.a).cwiseMax(c.b);
  }
  Sphere s;
  s.center = 0.5 * (lo + hi);
  s.radius = 0.0;
  for (const Capsule& c : caps) {
    s.radius = std::max({s.radius, (c.a - s.center).norm() + c.radius, (c.b - s.center).norm() + c.radius});
  }
  return s;
}

void refresh(const BodyState& b, BodyCache& cache) {
  cache.frames = forward_kinematics(*b.model, b.base, b.q);
  cache.capsules = world_capsules(b, cache.frames);
  cache.bounds.resize(cache.capsules.size());
  for (std::size_t i = 0; i < cache.capsules.size(); ++i) cache.bounds[i] = bound(cache.capsules[i]);
}

bool near(const Sphere& a, const Sphere& b, double margin) {
  if (a.radius < 0.0 || b.radius < 0.0) return false;
  return (a.center - b.center).norm() <= a.radius + b.radius + margin;
}

bool filter_pass(std::uint32_t ga, std::uint32_t ma, std::uint32_t gb, std::uint32_t mb) {
  return (ga & mb) != 0 && (gb & ma) != 0;
}

void link_pair_hits(const BodyCache& ca, int ba, int la, const BodyCache& cb, int bb, int lb,
                    double margin, std::vector<Hit>& out) {
  const auto& caps_a = ca.capsules[la];
  const auto& caps_b = cb.capsules[lb];
  for (int i = 0; i < static_cast<int>(caps_a.size()); ++i) {
    for (int j = 0; j < static_cast<int>(caps_b.size()); ++j) {
      CapsuleDistance d = capsule_distance(caps_a[i], caps_b[j]);
      if (d.distance < margin) {
        out.push_back({ba, la, i, bb, lb, j, d, std::min(caps_a[i].radius, caps_b[j].radius)});
      }
    }
  }
}

std::vector<Hit> collect_hits(const Scene& scene, const std::vector<BodyCache>& caches, double margin) {
  std::vector<Hit> hits;
  const int nb = static_cast<int>(scene.bodies.size());
  for (int ba = 0; ba < nb; ++ba) {
    const ArticulatedBody& ma = *scene.bodies[ba].model;
    for (int bb = ba + 1; bb < nb; ++bb) {
      const ArticulatedBody& mb = *scene.bodies[bb].model;
      for (int la = 0; la < ma.link_count(); ++la) {
        const Link& lka = ma.link(la);
        if (caches[ba].bounds[la].radius < 0.0) continue;
        for (int lb = 0; lb < mb.link_count(); ++lb) {
          const Link& lkb = mb.link(lb);
          if (!filter_pass(lka.group, lka.mask, lkb.group, lkb.mask)) continue;
          if (!near(caches[ba].bounds[la], caches[bb].bounds[lb], margin)) continue;
          link_pair_hits(caches[ba], ba, la, caches[bb], bb, lb, margin, hits);
        }
      }
    }
    for (int f = 0; f < static_cast<int>(scene.fixtures.size()); ++f) {
      const Fixture& fx = scene.fixtures[f];
      const Sphere fs = bound({fx.capsule});
      for (int la = 0; la < ma.link_count(); ++la) {
        const Link& lka = ma.link(la);
        if (!filter_pass(lka.group, lka.mask, fx.group, fx.mask)) continue;
        if (!near(caches[ba].bounds[la], fs, margin)) continue;
        const auto& caps_a = caches[ba].capsules[la];
        for (int i = 0; i < static_cast<int>(caps_a.size()); ++i) {
          CapsuleDistance d = capsule_distance(caps_a[i], fx.capsule);
          if (d.distance < margin) {
            hits.push_back({ba, la, i, kFixtureBody, f, 0, d, std::min(caps_a[i].radius, fx.capsule.radius)});
          }
        }
      }
    }
  }
  for (const SelfCollisionPair& sp : scene.self_pairs) {
    const BodyCache& c = caches.at(sp.body);
    if (!near(c.bounds.at(sp.link_a), c.bounds.at(sp.link_b), margin)) continue;
    link_pair_hits(c, sp.body, sp.link_a, c, sp.body, sp.link_b, margin, hits);
  }
  return hits;
}

// Pushes one overlapping pair apart along its normal with a minimum-norm
// joint correction, split by body compliance. Returns false when neither
// side can move.
bool project(Scene& scene, std::vector<BodyCache>& caches, const Hit& h) {
  const double pen = -h.d.distance + kSeparationBias;
  const Vec3 p = 0.5 * (h.d.surface_a + h.d.surface_b);
  const Vec3& n = h.d.normal;

  BodyState& a = scene.bodies[h.body_a];
  const Eigen::VectorXd ga =
      point_jacobian(*a.model, caches[h.body_a].frames, h.link_a, p).transpose() * n;

  if (h.body_a == h.body_b) {
    const Eigen::VectorXd gb =
        point_jacobian(*a.model, caches[h.body_a].frames, h.link_b, p).transpose() * n;
    const Eigen::VectorXd g = ga - gb;
    const double denom = a.compliance * g.squaredNorm();
    if (denom < 1e-12) return false;
    a.q = a.model->clamp(a.q + g * (a.compliance * pen / denom));
    refresh(a, caches[h.body_a]);
    return true;
  }

  const double wa = a.compliance;
  double denom = wa * ga.squaredNorm();
  Eigen::VectorXd gb;
  BodyState* b = nullptr;
  if (h.body_b != kFixtureBody) {
    b = &scene.bodies[h.body_b];
    gb = point_jacobian(*b->model, caches[h.body_b].frames, h.link_b, p).transpose() * n;
    denom += b->compliance * gb.squaredNorm();
  }
  if (denom < 1e-12) return false;
  const double scale = pen / denom;
  if (wa > 0.0) {
    a.q = a.model->clamp(a.q + ga * (wa * scale));
    refresh(a, caches[h.body_a]);
  }
  if (b != nullptr && b->compliance > 0.0) {
    b->q = b->model->clamp(b->q - gb * (b->compliance * scale));
    refresh(*b, caches[h.body_b]);
  }
  return true;
}

double deepest(const std::vector<Hit>& hits) {
  double worst = 0.0;
  for (const Hit& h : hits) worst = std::max(worst, -h.d.distance);
  return worst;
}

std::vector<BodyCache> build_caches(const Scene& s) {
  std::vector<BodyCache> caches(s.bodies.size());
  for (std::size_t b = 0; b < s.bodies.size(); ++b) refresh(s.bodies[b], caches[b]);
  return caches;
}

void resolve(Scene& s, std::vector<BodyCache>& caches, double slop) {
  for (int it = 0; it < s.params.resolve_iterations; ++it) {
    std::vector<Hit> hits = collect_hits(s, caches, 0.0);
    bool any = false;
    for (const Hit& h : hits) {
      if (-h.d.distance <= slop) continue;
      // Re-measure: earlier projections in this sweep may already have
      // separated the pair.
      const CapsuleDistance d = capsule_distance(
          caches[h.body_a].capsules[h.link_a][h.cap_a],
          h.body_b == kFixtureBody ? s.fixtures[h.link_b].capsule
                                   : caches[h.body_b].capsules[h.link_b][h.cap_b]);
      if (-d.distance <= slop) continue;
      Hit fresh = h;
      fresh.d = d;
      if (project(s, caches, fresh)) any = true;
    }
    if (!any) return;
  }
}

}  // namespace

std::vector<std::vector<Capsule>> world_capsules(const BodyState& body, const std::vector<Transform>& frames) {
  const ArticulatedBody& m = *body.model;
  std::vector<std::vector<Capsule>> out(m.link_count());
  for (int l = 0; l < m.link_count(); ++l) {
    out[l].reserve(m.link(l).capsules.size());
    for (const Capsule& c : m.link(l).capsules) out[l].push_back(transformed(frames[l], c));
  }
  return out;
}

Eigen::VectorXd strength_scale(const ArticulatedBody& body, const std::vector<Transform>& frames,
                               const Vec3& gravity) {
  const int n = body.link_count();
  std::vector<double> mass(n, 0.0);
  std::vector<Vec3> moment(n, Vec3::Zero());  // sum of m * com over the subtree
  for (int l = 0; l < n; ++l) {
    mass[l] = body.link(l).mass;
    moment[l] = body.link(l).mass * frames[l].apply(body.link(l).com);
  }
  for (int l = n - 1; l > 0; --l) {
    const int p = body.link(l).parent;
    mass[p] += mass[l];
    moment[p] += moment[l];
  }
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(body.dof());
  for (int k = 0; k < body.dof(); ++k) {
    const int l = body.link_of_dof(k);
    const JointSpec& js = body.link(l).joint;
    if (js.type != JointType::kRevolute || mass[l] <= 0.0) continue;
    const Vec3 pj = frames[l].translation();
    const Vec3 axis = frames[l].rotation() * js.axis;
    const double load = std::abs(axis.dot((moment[l] - mass[l] * pj).cross(gravity)));
    if (load > js.max_torque) scale[k] = js.max_torque / load;
  }
  return scale;
}

StepOutput step_quasistatic(const Scene& scene, const std::vector<Eigen::VectorXd>& commands) {
  if (commands.size() != scene.bodies.size()) {
    throw StepError("step: expected " + std::to_string(scene.bodies.size()) + " commands, got " +
                    std::to_string(commands.size()));
  }
  for (std::size_t b = 0; b < commands.size(); ++b) {
    const auto& c = commands[b];
    if (c.size() != 0 && c.size() != scene.bodies[b].model->dof()) {
      throw StepError("step: command for body '" + scene.bodies[b].name + "' has wrong size");
    }
    if (!c.allFinite()) throw StepError("step: non-finite command for body '" + scene.bodies[b].name + "'");
  }

  StepOutput out{scene, {}};
  Scene& s = out.scene;
  const ContactParams& prm = s.params;
  const double dt_sub = prm.dt / prm.substeps;
  const double slop = 0.25 * prm.tolerance;

  std::vector<Eigen::VectorXd> targets(s.bodies.size());
  for (std::size_t b = 0; b < s.bodies.size(); ++b) {
    const BodyState& body = s.bodies[b];
    targets[b] = commands[b].size() == 0 ? body.q : body.model->clamp(body.q + commands[b]);
  }

  std::map<Key, ContactReport> reports;
  auto record = [&](const Hit& h, double depth) {
    ContactReport& r = reports[key_of(h)];
    r.body_a = h.body_a;
    r.link_a = h.link_a;
    r.capsule_a = h.cap_a;
    r.body_b = h.body_b;
    r.link_b = h.link_b;
    r.capsule_b = h.cap_b;
    if (depth > r.depth) {
      r.depth = depth;
      r.point = 0.5 * (h.d.surface_a + h.d.surface_b);
      r.normal = h.d.normal;
      r.area = std::numbers::pi * h.radius_min * depth;
    }
  };

  std::vector<BodyCache> caches = build_caches(s);
  double overlap = deepest(collect_hits(s, caches, 0.0));
  for (int sub = 0; sub < prm.substeps; ++sub) {
    std::vector<Eigen::VectorXd> start(s.bodies.size());
    // Overlap already present (e.g. an initial pose the resolver could not
    // clear) must not freeze the scene: only growth past it is reverted.
    const double allowed = std::max(prm.tolerance, overlap);
    bool moved = false;
    for (std::size_t b = 0; b < s.bodies.size(); ++b) {
      BodyState& body = s.bodies[b];
      start[b] = body.q;
      const Eigen::VectorXd delta = targets[b] - body.q;
      if (delta.size() == 0 || delta.cwiseAbs().maxCoeff() == 0.0) continue;
      const Eigen::VectorXd strength = strength_scale(*body.model, caches[b].frames, prm.gravity);
      for (int k = 0; k < body.model->dof(); ++k) {
        const double cap = body.model->joint(k).max_velocity * dt_sub * strength[k];
        body.q[k] += std::clamp(delta[k], -cap, cap);
      }
      body.q = body.model->clamp(body.q);
      refresh(body, caches[b]);
      moved = true;
    }

    for (const Hit& h : collect_hits(s, caches, 0.0)) record(h, -h.d.distance);
    if (moved || sub == 0) resolve(s, caches, slop);

    for (const ValidityConstraint& vc : s.validity) {
      BodyState& body = s.bodies.at(vc.body);
      std::vector<double> sub_q(vc.dofs.size());
      for (std::size_t i = 0; i < vc.dofs.size(); ++i) sub_q[i] = body.q[vc.dofs[i]];
      if (!vc.predicate(sub_q)) {
        for (int k : vc.dofs) body.q[k] = start[vc.body][k];
        refresh(body, caches[vc.body]);
      }
    }

    const double after = deepest(collect_hits(s, caches, 0.0));
    if (after > allowed) {
      for (std::size_t b = 0; b < s.bodies.size(); ++b) s.bodies[b].q = start[b];
      caches = build_caches(s);
    } else {
      overlap = after;
    }
  }

  for (const Hit& h : collect_hits(s, caches, prm.tolerance)) {
    const Key k = key_of(h);
    if (reports.find(k) == reports.end()) record(h, 0.0);
  }
  out.contacts.reserve(reports.size());
  for (auto& [key, r] : reports) {
    const Capsule& ca = caches[r.body_a].capsules[r.link_a][r.capsule_a];
    const Capsule& cb = r.body_b == kFixtureBody ? s.fixtures[r.link_b].capsule
                                                 : caches[r.body_b].capsules[r.link_b][r.capsule_b];
    const CapsuleDistance d = capsule_distance(ca, cb);
    r.distance = d.distance;
    r.penetration = std::max(0.0, -d.distance);
    if (r.depth == 0.0) {
      r.point = 0.5 * (d.surface_a + d.surface_b);
      r.normal = d.normal;
    }
    r.force = prm.stiffness * r.depth;
    out.contacts.push_back(r);
  }
  ++s.step;
  return out;
}

std::vector<ContactReport> detect_contacts(const Scene& scene, double margin) {
  const std::vector<BodyCache> caches = build_caches(scene);
  std::vector<ContactReport> out;
  for (const Hit& h : collect_hits(scene, caches, margin)) {
    ContactReport r;
    r.body_a = h.body_a;
    r.link_a = h.link_a;
    r.capsule_a = h.cap_a;
    r.body_b = h.body_b;
    r.link_b = h.link_b;
    r.capsule_b = h.cap_b;
    r.point = 0.5 * (h.d.surface_a + h.d.surface_b);
    r.normal = h.d.normal;
    r.distance = h.d.distance;
    r.penetration = std::max(0.0, -h.d.distance);
    out.push_back(r);
  }
  return out;
}

double max_penetration(const Scene& scene) {
  return deepest(collect_hits(scene, build_caches(scene), 0.0));
}

}  // namespace adl::kin
