#include "weyllab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace weyllab::ode {

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, const Options& opt) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        acc += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

double initial_step(const Rhs& f, double t0, const Vector& y0, const Vector& f0, const Options& opt) {
    auto scaled = [&](const Vector& v) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y0[i]);
            acc += (v[i] / sc) * (v[i] / sc);
        }
        return std::sqrt(acc / static_cast<double>(v.size()));
    };
    const double dnf = scaled(f0), dny = scaled(y0);
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, opt.h_max);
    Vector y1 = y0 + h * f0, f1(y0.size());
    f(t0 + h, y1, f1);
    const double der2 = scaled(f1 - f0) / h;
    const double der = std::max(der2, dnf);
    const double h1 = der <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der, 0.2);
    return std::min({100.0 * h, h1, opt.h_max});
}

bool recoverable(const std::exception& e) {
    return dynamic_cast<const DomainError*>(&e) || dynamic_cast<const ConditioningError*>(&e);
}

}  // namespace

Vector DenseSegment::operator()(double t) const {
    const double s = h == 0.0 ? 0.0 : (t - t0) / h;
    const double s1 = 1.0 - s;
    return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
}

Vector DenseOutput::operator()(double t) const {
    if (segments_.empty()) throw ArgumentError("empty dense output");
    t = std::clamp(t, t_begin(), t_end());
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const DenseSegment& s) { return v < s.t0; });
    if (it != segments_.begin()) --it;
    return (*it)(t);
}

std::string to_string(Status s) {
    switch (s) {
        case Status::reached_end: return "reached-end";
        case Status::event: return "event";
        case Status::step_failure: return "step-failure";
        case Status::max_steps: return "max-steps";
    }
    return "unknown";
}

Result dopri5(const Rhs& f, double t0, const Vector& y0, double t_end, const Options& opt,
              const std::vector<Event>& events, const StepLimit& limit) {
    if (!(t_end > t0)) throw ArgumentError("dopri5: t_end must exceed t0");
    const Eigen::Index n = y0.size();
    Result res;
    res.ts.push_back(t0);
    res.ys.push_back(y0);

    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n);
    double t = t0;
    Vector y = y0;
    f(t, y, k1);

    std::vector<double> gprev(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) gprev[e] = events[e].g(t, y);

    double h = opt.h_initial > 0.0 ? opt.h_initial : initial_step(f, t, y, k1, opt);
    bool last_rejected = false;

    while (true) {
        if (res.accepted >= opt.max_steps) {
            res.status = Status::max_steps;
            break;
        }
        double hmax = opt.h_max;
        if (limit) hmax = std::min(hmax, limit(t, y));
        h = std::min(h, hmax);
        bool final_step = false;
        if (t + h >= t_end) {
            h = t_end - t;
            final_step = true;
        }
        const double h_min = opt.h_min_rel * std::max(1.0, std::abs(t));
        if (h < h_min) {
            res.status = Status::step_failure;
            res.failure = "step size " + std::to_string(h) + " below minimum at t=" + std::to_string(t);
            break;
        }

        bool stage_failed = false;
        try {
            ytmp = y + h * a21 * k1;
            f(t + c2 * h, ytmp, k2);
            ytmp = y + h * (a31 * k1 + a32 * k2);
            f(t + c3 * h, ytmp, k3);
            ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            f(t + c4 * h, ytmp, k4);
            ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(t + c5 * h, ytmp, k5);
            ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(t + h, ytmp, k6);
            y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            f(t + h, y1, k7);
        } catch (const std::exception& ex) {
            if (!recoverable(ex)) throw;
            stage_failed = true;
            res.failure = ex.what();
        }
        double err = std::numeric_limits<double>::infinity();
        if (!stage_failed) {
            const Vector e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            err = error_norm(e, y, y1, opt);
            if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
        }

        if (err > 1.0) {
            ++res.rejected;
            const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            h *= fac;
            last_rejected = true;
            continue;
        }

        DenseSegment seg;
        seg.t0 = t;
        seg.h = h;
        seg.r1 = y;
        seg.r2 = y1 - y;
        seg.r3 = h * k1 - seg.r2;
        seg.r4 = seg.r2 - h * k7 - seg.r3;
        seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

        const double t_new = final_step ? t_end : t + h;

        // Event detection on the new endpoint, located on the dense segment.
        int fired = -1;
        double t_fire = t_new;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double gn = events[e].g(t_new, y1);
            if (gprev[e] > 0.0 && gn <= 0.0) {
                double a = t, b = t_new, ga = gprev[e], gb = gn;
                int side = 0;
                for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
                    double m = (a * gb - b * ga) / (gb - ga);
                    if (!(m > a && m < b)) m = 0.5 * (a + b);
                    const double gm = events[e].g(m, seg(m));
                    if (gm > 0.0) {
                        a = m;
                        ga = gm;
                        if (side == -1) gb *= 0.5;
                        side = -1;
                    } else {
                        b = m;
                        gb = gm;
                        if (side == 1) ga *= 0.5;
                        side = 1;
                    }
                }
                if (events[e].terminal && (fired < 0 || b < t_fire)) {
                    fired = static_cast<int>(e);
                    t_fire = b;
                }
            }
            gprev[e] = gn;
        }

        ++res.accepted;
        if (opt.store_dense) res.dense.push(seg);
        if (fired >= 0) {
            res.status = Status::event;
            res.event_index = fired;
            res.t = t_fire;
            res.y = seg(t_fire);
            res.ts.push_back(res.t);
            res.ys.push_back(res.y);
            return res;
        }
        t = t_new;
        y = y1;
        k1 = k7;
        res.ts.push_back(t);
        res.ys.push_back(y);
        if (final_step) {
            res.status = Status::reached_end;
            break;
        }
        double fac = std::min(10.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
        if (last_rejected) fac = std::min(fac, 1.0);
        h *= fac;
        last_rejected = false;
    }
    res.t = t;
    res.y = y;
    return res;
}

}  // namespace weyllab::ode
