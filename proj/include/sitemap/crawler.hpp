#pragma once

#include "sitemap/archive.hpp"

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace sitemap {

// Planar crawler: one rigid trunk, four massless two-link limbs driven by
// sinusoidal joint targets, penalty ground contact under the limb tips and
// the trunk ends. All four lower links rake forward and ride nearly flat;
// clawed tips grip when sliding backward and skate when sliding forward, so
// effective strokes bias the body toward +x. Limb order: arm1, arm2 (front
// attachment), leg1, leg2 (rear). Joint order: 2k = shoulder/hip of limb k,
// 2k+1 = elbow/knee.
struct CrawlerConfig {
    double body_mass = 2.0;        // kg
    double body_length = 0.4;      // m
    double limb_upper = 0.06;      // m
    double arm_lower = 0.16;       // m, forearm paddle
    double leg_lower = 0.16;       // m, shin paddle
    double arm_rake = 1.35;        // rad, forearms sweep forward and ride flat
    double leg_rake = 1.35;        // rad, shins match the forearms
    double contact_stiffness = 800.0; // N/m
    double contact_damping = 70.0;     // N s/m
    double contact_ramp = 0.002;   // m, damping fades in over this penetration
    double friction_grip = 0.9;   // tip sliding backward digs in
    double friction_slide = 0.45;  // tip sliding forward skates over the ground
    double belly_friction = 0.25;  // smooth shell slides where the pads grip
    double friction_vreg = 0.02;   // m/s, tanh regularization
    double body_drag_lin = 5.0;    // N s/m
    double body_drag_rot = 0.6;    // N m s
    double gravity = 9.81;

    double amp_max = 1.0;          // rad
    double offset_min = -1.0;      // rad
    double offset_max = 1.0;       // rad
    double frequency = 1.0;        // Hz, fixed unless freq_gene
    bool freq_gene = false;        // 25th gene drives frequency
    double freq_min = 0.25;
    double freq_max = 2.0;

    double episode = 5.0;          // s
    double dt = 1e-3;              // s
    double warmup = 1.0;           // s excluded from the speed measurement
    bool peak_force = false;       // report peak instead of mean force sum

    void validate() const;
};

CrawlerConfig load_crawler_config(const std::string& path);
std::size_t crawler_genotype_size(const CrawlerConfig& cfg); // 24, 25 with freq_gene

struct ControllerParams {
    std::array<double, 8> amplitude{};
    std::array<double, 8> phase{};
    std::array<double, 8> offset{};
    double frequency = 1.0;
};

// Affine per-gene mapping: amplitude gene to [0, amp_max], phase gene to
// [0, 2pi], offset gene to [offset_min, offset_max]; genes grouped per joint.
ControllerParams decode(const Genotype& g, const CrawlerConfig& cfg);

struct DamageSpec {
    std::vector<std::pair<int, double>> locks; // (joint id, lock angle rad)

    void validate() const;
    bool locked(int joint, double& angle) const;
};

// none, d1 (arm1 shoulder at 0), d2 (leg1 hip at 0), d3 (arm1 shoulder at 0,
// elbow at pi/4), d4 (d2 and d3 combined).
DamageSpec damage_by_name(const std::string& name);

struct SimResult {
    double speed = 0.0;            // m/s over the post-warmup window
    std::array<double, 4> duty{};  // contact fraction per limb, whole episode
    double force_sum = 0.0;        // time-averaged limb normal-force total, N
    bool failed = false;
};

struct StepRecord {
    double t, x, z, pitch;
    std::array<double, 8> theta;
    std::array<bool, 4> contact;
    std::array<double, 4> fn;
};

SimResult simulate(const CrawlerConfig& cfg, const ControllerParams& ctrl,
                   const DamageSpec& damage,
                   const std::function<void(const StepRecord&)>& trace = {});

SimResult measure_with_damage(const CrawlerConfig& cfg, const Genotype& g,
                              const DamageSpec& damage);

} // namespace sitemap
