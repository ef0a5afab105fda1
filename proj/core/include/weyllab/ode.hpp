#pragma once

#include "weyllab/common.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace weyllab::ode {

using Rhs = std::function<void(double t, const Vector& y, Vector& dy)>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h_initial = 0.0;  // 0 selects a heuristic
    double h_max = std::numeric_limits<double>::infinity();
    /// Smallest admissible step relative to max(1, |t|).
    double h_min_rel = 1e-14;
    std::size_t max_steps = 2'000'000;
    bool store_dense = true;
};

/// Fires when g changes from positive to non-positive across a step. The
/// crossing is located on the dense output.
struct Event {
    std::string name;
    std::function<double(double t, const Vector& y)> g;
    bool terminal = true;
};

/// Optional per-step cap: the next step may not exceed limit(t, y).
using StepLimit = std::function<double(double t, const Vector& y)>;

/// Hairer's continuous extension of a single Dormand–Prince step.
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    Vector r1, r2, r3, r4, r5;
    Vector operator()(double t) const;
};

class DenseOutput {
public:
    void push(DenseSegment s) { segments_.push_back(std::move(s)); }
    bool empty() const { return segments_.empty(); }
    double t_begin() const { return segments_.front().t0; }
    double t_end() const { return segments_.back().t0 + segments_.back().h; }
    /// Interpolated state; t is clamped to [t_begin, t_end].
    Vector operator()(double t) const;
    const std::vector<DenseSegment>& segments() const { return segments_; }

private:
    std::vector<DenseSegment> segments_;
};

enum class Status { reached_end, event, step_failure, max_steps };
std::string to_string(Status s);

struct Result {
    Status status = Status::reached_end;
    int event_index = -1;  // index into the event list when status == event
    double t = 0.0;        // final parameter (event location when an event fired)
    Vector y;
    std::vector<double> ts;  // accepted step endpoints, starting at t0
    std::vector<Vector> ys;
    DenseOutput dense;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::string failure;  // diagnostic for step_failure
};

/// Integrates y' = f(t, y) from t0 to t_end (> t0) with DOPRI5.
Result dopri5(const Rhs& f, double t0, const Vector& y0, double t_end, const Options& opt = {},
              const std::vector<Event>& events = {}, const StepLimit& limit = {});

}  // namespace weyllab::ode
