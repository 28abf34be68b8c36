#pragma once

#include <cstdint>
#include <optional>

#include "rapid/kinematics.hpp"
#include "rapid/rolling_window.hpp"
#include "rapid/types.hpp"

namespace rapid {

struct TriggerConfig {
    double theta_comp = 0.65;  // compliance (acceleration) branch threshold
    double theta_red = 0.35;   // redundancy (torque) branch threshold
    double v_max = 1.0;        // rad/s; saturation speed for phase weighting, > 0
    int cooldown = 10;         // control ticks a dispatch stays hot, >= 0
    double eps = 1e-6;         // normalization guard, > 0
    std::size_t window_acc = 250;  // sensor ticks of M_acc history
    std::size_t window_tau = 50;   // sensor ticks: torque MA span and M_tau history
    std::size_t sensor_per_control = 25;  // sensor ticks per control tick, >= 1
    double nominal_dt_s = 0.002;   // expected sensor spacing; actual dt accepted
                                   // within [0.25, 4] x nominal
    WeightProfile weights;         // empty => ramp profile for the stream's N

    void validate() const;
};

struct PhaseWeights {
    double omega_a = 0.0;
    double omega_tau = 1.0;
};

// omega_a = clip(v / v_max, 0, 1), omega_tau = 1 - omega_a exactly.
PhaseWeights phase_weights(double v, double v_max);

double importance_score(const PhaseWeights& w, double m_acc_hat, double m_tau_hat);

// Dual-branch anomaly test, strict inequalities:
//   omega_a * m_acc_hat > theta_comp  OR  omega_tau * m_tau_hat > theta_red
bool evaluate_trigger(const PhaseWeights& w, double m_acc_hat, double m_tau_hat,
                      double theta_comp, double theta_red);

struct CooldownResult {
    bool dispatch = false;
    int cooldown = 0;
};

// One control tick of the dispatch gate: fire iff trigger && cooldown == 0;
// firing reloads the counter to `period`, otherwise it decays toward 0.
CooldownResult apply_cooldown(bool trigger, int cooldown, int period);

struct Decision {
    std::uint64_t t = 0;              // sensor tick
    bool control_boundary = false;
    std::int64_t control_tick = -1;   // valid at boundaries
    double m_acc = 0.0;               // raw scores for this sample
    double m_tau = 0.0;
    double m_acc_hat = 0.0;           // window-normalized scores
    double m_tau_hat = 0.0;
    double omega_a = 0.0;
    double omega_tau = 1.0;
    double s_imp = 0.0;               // blended importance, reporting only
    bool trigger = false;             // latched value at boundaries, instantaneous otherwise
    bool dispatch = false;            // set only at boundaries
    bool depletion = false;           // dispatch owed to an empty queue, not the trigger
    int cooldown_remaining = 0;
    bool warmup = false;
};

// Kinematic-triggered dispatcher. Feed one sensor sample per step() in tick
// order; every step returns a Decision. Control-rate logic (dispatch bit,
// cooldown) runs on ticks where t % sensor_per_control == 0; between
// boundaries the instantaneous trigger is OR-latched so short spikes cannot
// slip through the rate gap. Scores during the first max(window_acc,
// window_tau) sensor ticks are computed but the trigger is forced 0 while
// the normalization windows fill.
//
// State is three fixed windows plus scalars, so each step is O(N) in joints
// and O(1) in stream length.
class Dispatcher {
  public:
    Dispatcher(const TriggerConfig& cfg, std::size_t n_joints);

    Decision step(const JointState& sample, bool queue_empty);

    const Decision& last() const { return last_; }
    const TriggerConfig& config() const { return cfg_; }
    std::size_t joints() const { return n_joints_; }
    std::size_t footprint_bytes() const;

  private:
    TriggerConfig cfg_;
    std::size_t n_joints_;
    std::uint64_t warmup_ticks_;
    RollingWindow acc_stats_;  // M_acc history, capacity window_acc
    RollingWindow tau_ma_;     // raw torque-variation values, capacity window_tau
    RollingWindow tau_stats_;  // M_tau history, capacity window_tau
    std::optional<JointState> prev_;
    std::uint64_t seen_ = 0;
    int cooldown_ = 0;
    bool latched_ = false;
    Decision last_;
};

}  // namespace rapid
