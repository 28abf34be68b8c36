#include "rapid/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rapid {

void TriggerConfig::validate() const {
    if (!std::isfinite(theta_comp) || !std::isfinite(theta_red))
        throw ConfigError("trigger thresholds must be finite");
    if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("v_max must be > 0");
    if (cooldown < 0) throw ConfigError("cooldown must be >= 0");
    if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
    if (window_acc == 0 || window_tau == 0) throw ConfigError("windows must be >= 1");
    if (sensor_per_control == 0) throw ConfigError("sensor_per_control must be >= 1");
    if (!(nominal_dt_s > 0.0)) throw ConfigError("nominal_dt_s must be > 0");
}

PhaseWeights phase_weights(double v, double v_max) {
    if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("phase_weights: v_max must be > 0");
    if (!std::isfinite(v) || v < 0.0) throw StreamError("phase_weights: bad speed");
    PhaseWeights w;
    w.omega_a = std::clamp(v / v_max, 0.0, 1.0);
    w.omega_tau = 1.0 - w.omega_a;
    return w;
}

double importance_score(const PhaseWeights& w, double m_acc_hat, double m_tau_hat) {
    return w.omega_a * m_acc_hat + w.omega_tau * m_tau_hat;
}

bool evaluate_trigger(const PhaseWeights& w, double m_acc_hat, double m_tau_hat,
                      double theta_comp, double theta_red) {
    if (!std::isfinite(m_acc_hat) || !std::isfinite(m_tau_hat))
        throw StreamError("evaluate_trigger: non-finite score");
    return (w.omega_a * m_acc_hat > theta_comp) || (w.omega_tau * m_tau_hat > theta_red);
}

CooldownResult apply_cooldown(bool trigger, int cooldown, int period) {
    CooldownResult r;
    if (trigger && cooldown == 0) {
        r.dispatch = true;
        r.cooldown = period;
    } else {
        r.dispatch = false;
        r.cooldown = cooldown > 0 ? cooldown - 1 : 0;
    }
    return r;
}

Dispatcher::Dispatcher(const TriggerConfig& cfg, std::size_t n_joints)
    : cfg_(cfg),
      n_joints_(n_joints),
      warmup_ticks_(std::max(cfg.window_acc, cfg.window_tau)),
      acc_stats_(cfg.window_acc),
      tau_ma_(cfg.window_tau),
      tau_stats_(cfg.window_tau) {
    cfg_.validate();
    if (n_joints_ == 0) throw ConfigError("Dispatcher: need at least one joint");
    if (cfg_.weights.w.empty()) cfg_.weights = WeightProfile::ramp(n_joints_);
    cfg_.weights.validate(n_joints_);
}

Decision Dispatcher::step(const JointState& sample, bool queue_empty) {
    validate_sample(sample, n_joints_);

    Decision d;
    d.t = sample.t;

    if (prev_) {
        const double dt = sample.time_s - prev_->time_s;
        if (dt < 0.25 * cfg_.nominal_dt_s || dt > 4.0 * cfg_.nominal_dt_s)
            throw StreamError("sample spacing " + std::to_string(dt) +
                              "s outside accepted band at t=" + std::to_string(sample.t));
        const std::vector<double> qddot = finite_difference_accel(*prev_, sample);
        d.m_acc = accel_magnitude(qddot, cfg_.weights);
        const double tv = torque_variation(prev_->tau, sample.tau, cfg_.weights);

        d.m_acc_hat = acc_stats_.normalize(d.m_acc, cfg_.eps).z;
        acc_stats_.push(d.m_acc);

        tau_ma_.push(tv);
        d.m_tau = tau_ma_.moving_average();
        d.m_tau_hat = tau_stats_.normalize(d.m_tau, cfg_.eps).z;
        tau_stats_.push(d.m_tau);
    }

    const PhaseWeights pw = phase_weights(joint_speed(sample.qdot), cfg_.v_max);
    d.omega_a = pw.omega_a;
    d.omega_tau = pw.omega_tau;
    d.s_imp = importance_score(pw, d.m_acc_hat, d.m_tau_hat);
    d.warmup = seen_ < warmup_ticks_;

    const bool instantaneous =
        !d.warmup && evaluate_trigger(pw, d.m_acc_hat, d.m_tau_hat, cfg_.theta_comp, cfg_.theta_red);
    latched_ = latched_ || instantaneous;

    d.control_boundary = sample.t % cfg_.sensor_per_control == 0;
    if (d.control_boundary) {
        d.control_tick = static_cast<std::int64_t>(sample.t / cfg_.sensor_per_control);
        d.trigger = latched_;
        const CooldownResult cr = apply_cooldown(latched_, cooldown_, cfg_.cooldown);
        cooldown_ = cr.cooldown;
        d.dispatch = cr.dispatch || queue_empty;
        d.depletion = queue_empty && !cr.dispatch;
        latched_ = false;
    } else {
        d.trigger = instantaneous;
    }
    d.cooldown_remaining = cooldown_;

    prev_ = sample;
    ++seen_;
    last_ = d;
    return d;
}

std::size_t Dispatcher::footprint_bytes() const {
    std::size_t b = sizeof(*this);
    b += acc_stats_.footprint_bytes() + tau_ma_.footprint_bytes() + tau_stats_.footprint_bytes();
    b += cfg_.weights.w.capacity() * sizeof(double);
    if (prev_)
        b += (prev_->q.capacity() + prev_->qdot.capacity() + prev_->tau.capacity()) * sizeof(double);
    return b;
}

}  // namespace rapid
