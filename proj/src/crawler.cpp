#include "sitemap/crawler.hpp"

#include "sitemap/config.hpp"
#include "sitemap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sitemap {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
} // namespace

void CrawlerConfig::validate() const {
    if (!(body_mass > 0.0 && body_length > 0.0 && limb_upper > 0.0 && arm_lower > 0.0 &&
          leg_lower > 0.0)) {
        throw ConfigError("crawler: masses and lengths must be positive");
    }
    if (!(contact_stiffness > 0.0 && contact_damping >= 0.0 && friction_grip >= 0.0 &&
          friction_slide >= 0.0 && belly_friction >= 0.0 && friction_vreg > 0.0 &&
          contact_ramp > 0.0)) {
        throw ConfigError("crawler: contact parameters out of range");
    }
    if (!(body_drag_lin >= 0.0 && body_drag_rot >= 0.0)) {
        throw ConfigError("crawler: drag must be nonnegative");
    }
    if (!(std::fabs(arm_rake) < kPi && std::fabs(leg_rake) < kPi)) {
        throw ConfigError("crawler: rake out of range");
    }
    if (!(gravity > 0.0)) throw ConfigError("crawler: gravity must be positive");
    if (!(amp_max >= 0.0) || !(offset_max >= offset_min)) {
        throw ConfigError("crawler: controller ranges invalid");
    }
    if (!(frequency > 0.0 && freq_min > 0.0 && freq_max >= freq_min)) {
        throw ConfigError("crawler: frequency range invalid");
    }
    if (!(episode > 0.0 && dt > 0.0 && dt < episode)) throw ConfigError("crawler: bad episode/dt");
    if (!(warmup >= 0.0 && warmup < episode)) throw ConfigError("crawler: warmup must precede episode end");
}

CrawlerConfig load_crawler_config(const std::string& path) {
    auto kv = parse_key_value_file(path);
    kv_reject_unknown(kv,
                      {"body_mass", "body_length", "limb_upper", "arm_lower", "leg_lower",
                       "arm_rake", "leg_rake",
                       "contact_stiffness", "contact_damping", "contact_ramp",
                       "friction_grip", "friction_slide", "belly_friction",
                       "friction_vreg", "body_drag_lin", "body_drag_rot",
                       "gravity", "amp_max", "offset_min", "offset_max", "frequency",
                       "freq_gene", "freq_min", "freq_max", "episode", "dt", "warmup",
                       "peak_force"},
                      path);
    CrawlerConfig c;
    c.body_mass = kv_double(kv, "body_mass", c.body_mass);
    c.body_length = kv_double(kv, "body_length", c.body_length);
    c.limb_upper = kv_double(kv, "limb_upper", c.limb_upper);
    c.arm_lower = kv_double(kv, "arm_lower", c.arm_lower);
    c.leg_lower = kv_double(kv, "leg_lower", c.leg_lower);
    c.arm_rake = kv_double(kv, "arm_rake", c.arm_rake);
    c.leg_rake = kv_double(kv, "leg_rake", c.leg_rake);
    c.contact_stiffness = kv_double(kv, "contact_stiffness", c.contact_stiffness);
    c.contact_damping = kv_double(kv, "contact_damping", c.contact_damping);
    c.contact_ramp = kv_double(kv, "contact_ramp", c.contact_ramp);
    c.friction_grip = kv_double(kv, "friction_grip", c.friction_grip);
    c.friction_slide = kv_double(kv, "friction_slide", c.friction_slide);
    c.belly_friction = kv_double(kv, "belly_friction", c.belly_friction);
    c.friction_vreg = kv_double(kv, "friction_vreg", c.friction_vreg);
    c.body_drag_lin = kv_double(kv, "body_drag_lin", c.body_drag_lin);
    c.body_drag_rot = kv_double(kv, "body_drag_rot", c.body_drag_rot);
    c.gravity = kv_double(kv, "gravity", c.gravity);
    c.amp_max = kv_double(kv, "amp_max", c.amp_max);
    c.offset_min = kv_double(kv, "offset_min", c.offset_min);
    c.offset_max = kv_double(kv, "offset_max", c.offset_max);
    c.frequency = kv_double(kv, "frequency", c.frequency);
    c.freq_gene = kv_bool(kv, "freq_gene", c.freq_gene);
    c.freq_min = kv_double(kv, "freq_min", c.freq_min);
    c.freq_max = kv_double(kv, "freq_max", c.freq_max);
    c.episode = kv_double(kv, "episode", c.episode);
    c.dt = kv_double(kv, "dt", c.dt);
    c.warmup = kv_double(kv, "warmup", c.warmup);
    c.peak_force = kv_bool(kv, "peak_force", c.peak_force);
    c.validate();
    return c;
}

std::size_t crawler_genotype_size(const CrawlerConfig& cfg) { return cfg.freq_gene ? 25 : 24; }

ControllerParams decode(const Genotype& g, const CrawlerConfig& cfg) {
    const std::size_t want = crawler_genotype_size(cfg);
    if (g.params.size() != want) {
        throw InvalidArgument("decode: genotype needs " + std::to_string(want) + " genes");
    }
    for (double v : g.params) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("decode: gene outside [0,1]");
    }
    ControllerParams p;
    for (int j = 0; j < 8; ++j) {
        p.amplitude[j] = g.params[3 * j] * cfg.amp_max;
        p.phase[j] = g.params[3 * j + 1] * kTwoPi;
        p.offset[j] = cfg.offset_min + g.params[3 * j + 2] * (cfg.offset_max - cfg.offset_min);
    }
    p.frequency = cfg.freq_gene ? cfg.freq_min + g.params[24] * (cfg.freq_max - cfg.freq_min)
                                : cfg.frequency;
    return p;
}

void DamageSpec::validate() const {
    for (std::size_t i = 0; i < locks.size(); ++i) {
        if (locks[i].first < 0 || locks[i].first >= 8) {
            throw InvalidArgument("damage: joint id out of range");
        }
        for (std::size_t j = i + 1; j < locks.size(); ++j) {
            if (locks[i].first == locks[j].first) {
                throw InvalidArgument("damage: duplicate joint id");
            }
        }
    }
}

bool DamageSpec::locked(int joint, double& angle) const {
    for (const auto& [id, a] : locks) {
        if (id == joint) {
            angle = a;
            return true;
        }
    }
    return false;
}

DamageSpec damage_by_name(const std::string& name) {
    if (name == "none") return {};
    if (name == "d1") return {{{0, 0.0}}};
    if (name == "d2") return {{{4, 0.0}}};
    if (name == "d3") return {{{0, 0.0}, {1, kPi / 4.0}}};
    if (name == "d4") return {{{0, 0.0}, {1, kPi / 4.0}, {4, 0.0}}};
    throw InvalidArgument("unknown damage '" + name + "' (use none, d1, d2, d3, d4)");
}

namespace {

struct LimbState {
    double q1, q2, dq1, dq2;
};

// Joint targets at time t with damage locks applied.
inline void joint_angles(const ControllerParams& ctrl, const bool* locked,
                         const double* lock_angle, double omega, double t,
                         std::array<LimbState, 4>& limbs) {
    for (int k = 0; k < 4; ++k) {
        int j1 = 2 * k, j2 = 2 * k + 1;
        double u1 = omega * t + ctrl.phase[j1];
        double u2 = omega * t + ctrl.phase[j2];
        LimbState s;
        if (locked[j1]) {
            s.q1 = lock_angle[j1];
            s.dq1 = 0.0;
        } else {
            s.q1 = ctrl.offset[j1] + ctrl.amplitude[j1] * std::sin(u1);
            s.dq1 = ctrl.amplitude[j1] * omega * std::cos(u1);
        }
        if (locked[j2]) {
            s.q2 = lock_angle[j2];
            s.dq2 = 0.0;
        } else {
            s.q2 = ctrl.offset[j2] + ctrl.amplitude[j2] * std::sin(u2);
            s.dq2 = ctrl.amplitude[j2] * omega * std::cos(u2);
        }
        limbs[k] = s;
    }
}

} // namespace

SimResult simulate(const CrawlerConfig& cfg, const ControllerParams& ctrl,
                   const DamageSpec& damage,
                   const std::function<void(const StepRecord&)>& trace) {
    cfg.validate();
    damage.validate();

    bool locked[8] = {};
    double lock_angle[8] = {};
    for (const auto& [id, a] : damage.locks) {
        locked[id] = true;
        lock_angle[id] = a;
    }
    // a seized joint cannot work the claw, so a damaged limb's tip skates in
    // both directions instead of ratcheting
    bool limb_hurt[4] = {};
    for (int k = 0; k < 4; ++k) limb_hurt[k] = locked[2 * k] || locked[2 * k + 1];

    const double m = cfg.body_mass;
    const double inertia = m * cfg.body_length * cfg.body_length / 12.0;
    const double half = cfg.body_length / 2.0;
    const double l1 = cfg.limb_upper;
    const double l2_of[4] = {cfg.arm_lower, cfg.arm_lower, cfg.leg_lower, cfg.leg_lower};
    const double omega = kTwoPi * ctrl.frequency;
    const double dt = cfg.dt;
    const auto steps = static_cast<std::size_t>(std::llround(cfg.episode / dt));
    const auto warm_step = static_cast<std::size_t>(std::llround(cfg.warmup / dt));
    // arms share the front attachment, legs the rear
    const double attach_x[4] = {half, half, -half, -half};

    // initial posture: pitch 0, deepest contact point exactly on the ground
    const double rake_of[4] = {cfg.arm_rake, cfg.arm_rake, cfg.leg_rake, cfg.leg_rake};
    std::array<LimbState, 4> limbs;
    joint_angles(ctrl, locked, lock_angle, omega, 0.0, limbs);
    double lowest = 0.0; // trunk ends sit at height 0 relative to the center
    for (int k = 0; k < 4; ++k) {
        double a1 = limbs[k].q1;
        double a2 = a1 + rake_of[k] + limbs[k].q2;
        double tip_rel = -l1 * std::cos(a1) - l2_of[k] * std::cos(a2);
        lowest = std::min(lowest, tip_rel);
    }

    double x = 0.0, z = -lowest, pitch = 0.0;
    double vx = 0.0, vz = 0.0, w = 0.0;

    SimResult res;
    std::array<std::size_t, 4> contact_steps{};
    double force_accum = 0.0;
    double force_peak = 0.0;
    double x_warm = 0.0;
    bool ok = true;

    for (std::size_t i = 0; i < steps; ++i) {
        double t = static_cast<double>(i) * dt;
        if (i == warm_step) x_warm = x;

        joint_angles(ctrl, locked, lock_angle, omega, t, limbs);

        double sp = std::sin(pitch), cp = std::cos(pitch);
        double fx = 0.0, fz = 0.0, torque = 0.0;
        double step_force = 0.0;
        StepRecord rec;

        for (int k = 0; k < 4; ++k) {
            const LimbState& s = limbs[k];
            const double l2 = l2_of[k];
            double a1 = pitch + s.q1;
            double a2 = a1 + rake_of[k] + s.q2;
            double s1 = std::sin(a1), c1 = std::cos(a1);
            double s2 = std::sin(a2), c2 = std::cos(a2);

            // attachment in world, relative to the center of mass
            double rx = attach_x[k] * cp;
            double rz = attach_x[k] * sp;
            double tip_rx = rx + l1 * s1 + l2 * s2;
            double tip_rz = rz - l1 * c1 - l2 * c2;
            double tip_z = z + tip_rz;

            // boundary inclusive so a tip resting exactly on the surface
            // counts as contact (it carries zero force there)
            bool touching = tip_z <= 0.0;
            if (touching) ++contact_steps[k];

            double fn = 0.0;
            if (touching) {
                double rate1 = w + s.dq1;
                double rate2 = rate1 + s.dq2;
                double tip_vx = vx - w * rz + rate1 * l1 * c1 + rate2 * l2 * c2;
                double tip_vz = vz + w * rx + rate1 * l1 * s1 + rate2 * l2 * s2;
                double ramp = std::min(1.0, -tip_z / cfg.contact_ramp);
                fn = cfg.contact_stiffness * (-tip_z) -
                     cfg.contact_damping * ramp * tip_vz;
                if (fn < 0.0) fn = 0.0;
                double slip = std::tanh(tip_vx / cfg.friction_vreg);
                double mu = limb_hurt[k]
                                ? cfg.friction_slide
                                : 0.5 * (cfg.friction_grip + cfg.friction_slide) -
                                      0.5 * (cfg.friction_grip - cfg.friction_slide) * slip;
                double ft = -mu * fn * slip;
                fx += ft;
                fz += fn;
                torque += tip_rx * fn - tip_rz * ft;
            }
            step_force += fn;
            if (trace) {
                rec.contact[k] = touching;
                rec.fn[k] = fn;
            }
        }

        // trunk ends resting on the ground carry weight without counting
        // toward the limb force metric
        for (int e = 0; e < 2; ++e) {
            double ax = e == 0 ? half : -half;
            double rx = ax * cp;
            double rz = ax * sp;
            double pz = z + rz;
            if (pz < 0.0) {
                double pvx = vx - w * rz;
                double pvz = vz + w * rx;
                double ramp = std::min(1.0, -pz / cfg.contact_ramp);
                double fn = cfg.contact_stiffness * (-pz) -
                            cfg.contact_damping * ramp * pvz;
                if (fn < 0.0) fn = 0.0;
                double ft = -cfg.belly_friction * fn * std::tanh(pvx / cfg.friction_vreg);
                fx += ft;
                fz += fn;
                torque += rx * fn - rz * ft;
            }
        }

        fx -= cfg.body_drag_lin * vx;
        fz -= cfg.body_drag_lin * vz;
        torque -= cfg.body_drag_rot * w;

        force_accum += step_force;
        force_peak = std::max(force_peak, step_force);

        if (trace) {
            rec.t = t;
            rec.x = x;
            rec.z = z;
            rec.pitch = pitch;
            for (int j = 0; j < 8; ++j) {
                rec.theta[j] = j % 2 == 0 ? limbs[j / 2].q1 : limbs[j / 2].q2;
            }
            trace(rec);
        }

        vx += dt * fx / m;
        vz += dt * (fz / m - cfg.gravity);
        w += dt * torque / inertia;
        x += dt * vx;
        z += dt * vz;
        pitch += dt * w;

        if (!std::isfinite(x) || !std::isfinite(z) || !std::isfinite(pitch) ||
            !std::isfinite(vx) || !std::isfinite(vz) || !std::isfinite(w) ||
            std::fabs(pitch) > kPi / 2.0) {
            ok = false;
            break;
        }
    }

    if (!ok) {
        res.failed = true;
        return res;
    }
    double measured = cfg.episode - cfg.warmup;
    res.speed = (x - x_warm) / measured;
    for (int k = 0; k < 4; ++k) {
        res.duty[k] = static_cast<double>(contact_steps[k]) / static_cast<double>(steps);
    }
    res.force_sum = cfg.peak_force ? force_peak
                                   : force_accum * dt / cfg.episode;
    return res;
}

SimResult measure_with_damage(const CrawlerConfig& cfg, const Genotype& g,
                              const DamageSpec& damage) {
    return simulate(cfg, decode(g, cfg), damage);
}

} // namespace sitemap
