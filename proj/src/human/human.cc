#include "adl/human/human.h"

#include <cmath>
#include <numbers>

#include "adl/core/error.h"
#include "adl/kinematics/body_io.h"

namespace adl::human {
namespace {

using kin::Capsule;
using kin::JointType;
using kin::Link;
namespace group = kin::group;

constexpr double kDeg = std::numbers::pi / 180.0;

double lookup(const std::map<std::string, double>& m, const std::string& k, const char* table) {
  const auto it = m.find(k);
  if (it == m.end()) throw LoadError(std::string("anthropometry: missing ") + table + " entry '" + k + "'");
  return it->second;
}

SegmentTable segment_table(const nlohmann::json& j) {
  SegmentTable t;
  t.lengths = j.at("lengths").get<std::map<std::string, double>>();
  t.radii = j.at("radii").get<std::map<std::string, double>>();
  t.masses = j.at("masses").get<std::map<std::string, double>>();
  t.strength_scale = j.value("strength_scale", 1.0);
  for (const auto* m : {&t.lengths, &t.radii}) {
    for (const auto& [k, v] : *m) {
      if (!(v > 0.0)) throw LoadError("anthropometry: '" + k + "' must be positive");
    }
  }
  return t;
}

class Builder {
 public:
  Builder(const SegmentTable& seg, const Anthropometry& table) : seg_(seg), table_(table) {}

  int root(const std::string& name, double mass, std::vector<Capsule> caps, std::uint32_t grp) {
    Link l;
    l.name = name;
    l.parent = -1;
    l.joint.name = name + "_fixed";
    l.mass = mass;
    l.capsules = std::move(caps);
    l.group = grp;
    links_.push_back(std::move(l));
    return 0;
  }

  // Revolute joint named `joint` (table key `key`) at `xyz` in parent frame.
  int joint(const std::string& joint, const std::string& key, int parent, const Vec3& xyz,
            const Vec3& axis, std::uint32_t grp) {
    const auto it = table_.joints.find(key);
    if (it == table_.joints.end()) throw LoadError("anthropometry: missing joint '" + key + "'");
    const JointTableEntry& e = it->second;
    Link l;
    l.name = joint + "_link";
    l.parent = parent;
    l.origin = Transform::from_translation(xyz);
    l.joint.name = joint;
    l.joint.type = JointType::kRevolute;
    l.joint.axis = axis;
    l.joint.lower = e.lower_deg * kDeg;
    l.joint.upper = e.upper_deg * kDeg;
    l.joint.max_torque = e.max_torque * seg_.strength_scale;
    l.joint.max_velocity = e.max_velocity;
    l.group = grp;
    links_.push_back(std::move(l));
    return static_cast<int>(links_.size()) - 1;
  }

  void shape(int link, double mass, const Vec3& com, std::vector<Capsule> caps) {
    links_[link].mass = mass;
    links_[link].com = com;
    links_[link].capsules = std::move(caps);
  }

  int fixed(const std::string& name, int parent, const Transform& origin) {
    Link l;
    l.name = name;
    l.parent = parent;
    l.origin = origin;
    l.joint.name = name + "_fixed";
    l.group = links_[parent].group;
    links_.push_back(std::move(l));
    return static_cast<int>(links_.size()) - 1;
  }

  std::vector<Link> take() { return std::move(links_); }

 private:
  const SegmentTable& seg_;
  const Anthropometry& table_;
  std::vector<Link> links_;
};

struct ArmLinks {
  std::array<int, kArmJoints> joint_links{};
  int clavicle, upper_arm, forearm, hand;
};

ArmLinks build_arm(Builder& b, const SegmentTable& seg, int chest, double side, const std::string& pfx) {
  // side = -1 for the right arm (toward -y), +1 for the left. Rotation axes
  // mirror across the sagittal plane: x and z components flip sign.
  const double m = -side;  // +1 right, -1 left
  const double torso = seg.length("torso");
  const double sw = seg.length("shoulder_half_width");
  const double upper = seg.length("upper_arm");
  const double fore = seg.length("forearm");
  const double hand = seg.length("hand");
  const auto ax = Vec3(-m, 0, 0);  // abduction-type axis
  const auto ay = Vec3(0, -1, 0);  // flexion-type axis
  const auto az = Vec3(0, 0, m);   // internal-rotation-type axis
  const auto arm = group::kHumanArm;

  ArmLinks out;
  int l = b.joint(pfx + "pecs_x", "pecs_x", chest, Vec3(0, side * 0.03, torso - 0.06), ax, group::kHumanTrunk);
  out.joint_links[0] = l;
  l = out.joint_links[1] = b.joint(pfx + "pecs_y", "pecs_y", l, Vec3::Zero(), ay, group::kHumanTrunk);
  l = out.joint_links[2] = b.joint(pfx + "pecs_z", "pecs_z", l, Vec3::Zero(), az, group::kHumanTrunk);
  out.clavicle = l;
  l = out.joint_links[3] = b.joint(pfx + "shoulder_x", "shoulder_x", l, Vec3(0, side * (sw - 0.03), 0), ax, arm);
  l = out.joint_links[4] = b.joint(pfx + "shoulder_y", "shoulder_y", l, Vec3::Zero(), ay, arm);
  l = out.joint_links[5] = b.joint(pfx + "shoulder_z", "shoulder_z", l, Vec3::Zero(), az, arm);
  out.upper_arm = l;
  b.shape(l, seg.mass("upper_arm"), Vec3(0, 0, -upper / 2),
          {{Vec3(0, 0, -0.02), Vec3(0, 0, -upper), seg.radius("upper_arm")}});
  l = out.joint_links[6] = b.joint(pfx + "elbow", "elbow", l, Vec3(0, 0, -upper), ay, arm);
  l = out.joint_links[7] = b.joint(pfx + "forearm", "forearm", l, Vec3::Zero(), az, arm);
  out.forearm = l;
  b.shape(l, seg.mass("forearm"), Vec3(0, 0, -fore / 2),
          {{Vec3(0, 0, 0), Vec3(0, 0, -fore), seg.radius("forearm")}});
  l = out.joint_links[8] = b.joint(pfx + "wrist_x", "wrist_x", l, Vec3(0, 0, -fore), ax, arm);
  l = out.joint_links[9] = b.joint(pfx + "wrist_y", "wrist_y", l, Vec3::Zero(), ay, arm);
  out.hand = l;
  const double rh = seg.radius("hand");
  b.shape(l, seg.mass("hand"), Vec3(0, 0, -hand / 2), {{Vec3(0, 0, -rh), Vec3(0, 0, -hand + rh), rh}});
  return out;
}

void build_leg(Builder& b, const SegmentTable& seg, double side, const std::string& pfx) {
  const double m = -side;
  const double thigh = seg.length("thigh");
  const double shin = seg.length("shin");
  const double foot = seg.length("foot");
  const auto leg = group::kHumanLeg;
  int l = b.joint(pfx + "hip_x", "hip_x", 0, Vec3(0, side * seg.length("hip_half_width"), -0.05), Vec3(-m, 0, 0), leg);
  l = b.joint(pfx + "hip_y", "hip_y", l, Vec3::Zero(), Vec3(0, -1, 0), leg);
  l = b.joint(pfx + "hip_z", "hip_z", l, Vec3::Zero(), Vec3(0, 0, m), leg);
  b.shape(l, seg.mass("thigh"), Vec3(0, 0, -thigh / 2), {{Vec3(0, 0, -0.05), Vec3(0, 0, -thigh), seg.radius("thigh")}});
  l = b.joint(pfx + "knee", "knee", l, Vec3(0, 0, -thigh), Vec3(0, 1, 0), leg);
  b.shape(l, seg.mass("shin"), Vec3(0, 0, -shin / 2), {{Vec3(0, 0, 0), Vec3(0, 0, -shin), seg.radius("shin")}});
  l = b.joint(pfx + "ankle_x", "ankle_x", l, Vec3(0, 0, -shin), Vec3(-m, 0, 0), leg);
  l = b.joint(pfx + "ankle_y", "ankle_y", l, Vec3::Zero(), Vec3(0, 1, 0), leg);
  l = b.joint(pfx + "ankle_z", "ankle_z", l, Vec3::Zero(), Vec3(0, 0, m), leg);
  const double rf = seg.radius("foot");
  b.shape(l, seg.mass("foot"), Vec3(foot / 3, 0, -0.05), {{Vec3(-0.03, 0, -0.05), Vec3(foot - 0.05, 0, -0.05), rf}});
}

ArmChain arm_chain(const kin::ArticulatedBody& body, const ArmLinks& links, const SegmentTable& seg) {
  ArmChain c;
  for (int i = 0; i < kArmJoints; ++i) c.dofs[i] = body.dof_of_link(links.joint_links[i]);
  c.clavicle = links.clavicle;
  c.upper_arm = links.upper_arm;
  c.forearm = links.forearm;
  c.hand = links.hand;
  c.shoulder_frame = links.joint_links[5];
  c.elbow_frame = links.joint_links[7];
  c.wrist_frame = links.joint_links[9];
  c.upper_arm_length = seg.length("upper_arm");
  c.forearm_length = seg.length("forearm");
  c.hand_length = seg.length("hand");
  return c;
}

}  // namespace

std::string to_string(Sex s) { return s == Sex::kMale ? "male" : "female"; }

Sex sex_from_string(const std::string& s) {
  if (s == "male") return Sex::kMale;
  if (s == "female") return Sex::kFemale;
  throw ParameterError("unknown sex '" + s + "'");
}

double SegmentTable::length(const std::string& k) const { return lookup(lengths, k, "length"); }
double SegmentTable::radius(const std::string& k) const { return lookup(radii, k, "radius"); }
double SegmentTable::mass(const std::string& k) const { return lookup(masses, k, "mass"); }

Anthropometry anthropometry_from_json(const nlohmann::json& j) {
  try {
    Anthropometry a;
    a.male = segment_table(j.at("sexes").at("male"));
    a.female = segment_table(j.at("sexes").at("female"));
    for (const auto& [name, e] : j.at("joints").items()) {
      JointTableEntry t;
      t.lower_deg = e.at("limits").at(0).get<double>();
      t.upper_deg = e.at("limits").at(1).get<double>();
      t.max_torque = e.at("max_torque").get<double>();
      t.max_velocity = e.at("max_velocity").get<double>();
      if (!(t.lower_deg <= 0.0 && 0.0 <= t.upper_deg)) {
        throw LoadError("anthropometry: joint '" + name + "' limits must bracket 0");
      }
      if (!(t.max_torque > 0.0) || !(t.max_velocity > 0.0)) {
        throw LoadError("anthropometry: joint '" + name + "' needs positive torque and velocity");
      }
      a.joints[name] = t;
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("anthropometry: malformed config: ") + e.what());
  }
}

Anthropometry load_anthropometry(const std::filesystem::path& path) {
  return anthropometry_from_json(kin::read_json_file(path));
}

const Anthropometry& default_anthropometry() {
  static const Anthropometry a = load_anthropometry(kin::data_dir() / "human" / "anthropometry.json");
  return a;
}

HumanModel generate_human(Sex sex, const Anthropometry& table) {
  const SegmentTable& seg = table.table(sex);
  Builder b(seg, table);
  const double hw = seg.length("hip_half_width");
  const double torso = seg.length("torso");
  const double rt = seg.radius("torso");
  const double neck = seg.length("neck");
  const double rhead = seg.length("head_radius");

  b.root("pelvis", seg.mass("pelvis"), {{Vec3(0, -hw, 0), Vec3(0, hw, 0), seg.radius("pelvis")}}, group::kHumanTrunk);
  int l = b.joint("waist_y", "waist_y", 0, Vec3(0, 0, 0.05), Vec3(0, 1, 0), group::kHumanTrunk);
  const int chest = b.joint("waist_z", "waist_z", l, Vec3::Zero(), Vec3(0, 0, 1), group::kHumanTrunk);
  b.shape(chest, seg.mass("torso"), Vec3(0, 0, torso / 2),
          {{Vec3(0, 0, rt * 0.6), Vec3(0, 0, torso - rt * 0.9), rt}});

  l = b.joint("neck_y", "neck_y", chest, Vec3(0, 0, torso), Vec3(0, 1, 0), group::kHumanTrunk);
  b.shape(l, seg.mass("neck"), Vec3(0, 0, neck / 2), {{Vec3(0, 0, 0), Vec3(0, 0, neck), seg.radius("neck")}});
  l = b.joint("head_x", "head_x", l, Vec3(0, 0, neck), Vec3(1, 0, 0), group::kHumanHead);
  l = b.joint("head_y", "head_y", l, Vec3::Zero(), Vec3(0, 1, 0), group::kHumanHead);
  const int head = b.joint("head_z", "head_z", l, Vec3::Zero(), Vec3(0, 0, 1), group::kHumanHead);
  const Vec3 head_center(0.02, 0, rhead);
  b.shape(head, seg.mass("head"), head_center, {{head_center, head_center, rhead}});
  // Mouth: on the front of the face, 20 deg below the head centre, 1 cm out.
  const double a = 20.0 * kDeg;
  const Vec3 mouth_pos = head_center + (rhead + 0.01) * Vec3(std::cos(a), 0, -std::sin(a));
  const int mouth = b.fixed("mouth", head, Transform::from_translation(mouth_pos));

  const ArmLinks right = build_arm(b, seg, chest, -1.0, "right_");
  const ArmLinks left = build_arm(b, seg, chest, 1.0, "left_");
  build_leg(b, seg, -1.0, "right_");
  build_leg(b, seg, 1.0, "left_");

  HumanModel h;
  h.sex = sex;
  h.body = kin::ArticulatedBody("human_" + to_string(sex), b.take());
  h.right_arm = arm_chain(h.body, right, seg);
  h.left_arm = arm_chain(h.body, left, seg);
  const char* head_joints[kHeadJoints] = {"neck_y", "head_x", "head_y", "head_z"};
  for (int i = 0; i < kHeadJoints; ++i) h.head_dofs[i] = h.body.dof_index(head_joints[i]);
  h.pelvis = 0;
  h.chest = chest;
  h.head = head;
  h.mouth = mouth;
  h.head_radius = rhead;
  h.torso_length = torso;
  for (const ArmLinks* arm : {&right, &left}) {
    for (int limb : {arm->upper_arm, arm->forearm, arm->hand}) {
      for (int trunk : {0, chest, head}) {
        if (limb == arm->upper_arm && trunk == chest) continue;  // shoulder joint overlap
        h.self_pairs.emplace_back(limb, trunk);
      }
    }
  }
  if (h.body.dof() != kControllableJoints) {
    throw LoadError("generated human has " + std::to_string(h.body.dof()) + " joints");
  }
  return h;
}

double shoulder_elevation(std::span<const double> q_arm) {
  if (q_arm.size() != kArmJoints) throw ParameterError("shoulder_elevation: expected 10 arm joints");
  // Right-arm axes; the elevation angle is mirror-symmetric.
  const Mat3 r = (Eigen::AngleAxisd(q_arm[3], Vec3(-1, 0, 0)) * Eigen::AngleAxisd(q_arm[4], Vec3(0, -1, 0)))
                     .toRotationMatrix();
  const Vec3 d = r * Vec3(0, 0, -1);
  return std::acos(std::clamp(-d.z(), -1.0, 1.0));
}

}  // namespace adl::human
