#include "weyllab/conelike.hpp"

#include "weyllab/optimize.hpp"

#include <cmath>
#include <random>

namespace weyllab {

HomothetyGroup::HomothetyGroup(std::vector<Generator> generators, DistanceFn distance, std::string distance_tag)
    : gens_(std::move(generators)), distance_(std::move(distance)), tag_(std::move(distance_tag)) {
    if (gens_.empty()) throw ArgumentError("a homothety group needs at least one generator");
    for (const auto& g : gens_) {
        if (!(g.ratio > 1.0)) throw ArgumentError("generator '" + g.name + "' must be expanding (ratio > 1)");
        if (!g.forward || !g.inverse) throw ArgumentError("generator '" + g.name + "' lacks a map");
    }
    if (!distance_) throw ArgumentError("a homothety group needs a distance oracle");
}

Vector HomothetyGroup::apply(const Word& w, const Vector& x) const {
    Vector y = x;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        if (it->generator < 0 || static_cast<std::size_t>(it->generator) >= gens_.size())
            throw ArgumentError("word refers to generator " + std::to_string(it->generator));
        const Generator& g = gens_[static_cast<std::size_t>(it->generator)];
        const auto& map = it->exponent > 0 ? g.forward : g.inverse;
        for (long k = 0; k < std::abs(it->exponent); ++k) y = map(y);
    }
    return y;
}

double HomothetyGroup::ratio(const Word& w) const {
    double r = 1.0;
    for (const auto& l : w) {
        if (l.generator < 0 || static_cast<std::size_t>(l.generator) >= gens_.size())
            throw ArgumentError("word refers to generator " + std::to_string(l.generator));
        r *= std::pow(gens_[static_cast<std::size_t>(l.generator)].ratio, static_cast<double>(l.exponent));
    }
    return r;
}

double HomothetyGroup::displacement(const Vector& x) const {
    double d = 0.0;
    for (const auto& g : gens_) d = std::max(d, distance_(x, g.forward(x)));
    return d;
}

Word concat(const Word& a, const Word& b) {
    Word out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Word inverse(const Word& w) {
    Word out(w.rbegin(), w.rend());
    for (auto& l : out) l.exponent = -l.exponent;
    return out;
}

std::vector<long> exponent_vector(const HomothetyGroup& g, const Word& w) {
    std::vector<long> e(g.size(), 0);
    for (const auto& l : w) e.at(static_cast<std::size_t>(l.generator)) += l.exponent;
    return e;
}

double homothety_residual(const HomothetyGroup& g, std::size_t generator,
                          const std::vector<std::pair<Vector, Vector>>& pairs) {
    const Generator& h = g.generators().at(generator);
    double worst = 0.0;
    for (const auto& [x, y] : pairs) {
        const double d = g.distance(x, y);
        if (!(d > 0.0)) continue;
        worst = std::max(worst, std::abs(g.distance(h.forward(x), h.forward(y)) / (h.ratio * d) - 1.0));
    }
    return worst;
}

bool isometry_free(const HomothetyGroup& g, const std::vector<Word>& words, const std::vector<Vector>& points,
                   double tol) {
    for (const auto& w : words) {
        if (std::abs(g.ratio(w) - 1.0) > 1e-12) continue;
        for (const auto& x : points)
            if (g.distance(x, g.apply(w, x)) > tol * std::max(1.0, x.norm())) return false;
    }
    return true;
}

double k_bound(const HomothetyGroup& g, const Vector& x) {
    double prod = 1.0;
    for (const auto& h : g.generators()) prod *= h.ratio / (h.ratio - 1.0);
    return g.displacement(x) * (prod + 1.0);
}

double word_bound(const HomothetyGroup& g, const Vector& x, const std::vector<long>& exponents) {
    if (exponents.size() != g.size()) throw ArgumentError("one exponent per generator expected");
    double prod = 1.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] < 0) throw ArgumentError("word_bound needs non-negative exponents");
        const double r = g.generators()[i].ratio;
        prod *= (std::pow(r, static_cast<double>(exponents[i] + 1)) - 1.0) / (r - 1.0);
    }
    return g.displacement(x) * prod;
}

Word word_from_exponents(const std::vector<long>& exponents) {
    Word w;
    for (std::size_t i = 0; i < exponents.size(); ++i)
        if (exponents[i] != 0) w.push_back({static_cast<int>(i), exponents[i]});
    return w;
}

BoundCheck cauchy_contraction(const HomothetyGroup& g, const Vector& x, const Word& f, int m, int n) {
    const double rho = g.ratio(f);
    if (!(rho < 1.0)) throw ArgumentError("cauchy_contraction needs a contracting word");
    if (m < 0 || m > n) throw ArgumentError("cauchy_contraction needs 0 <= m <= n");
    Vector xm = x;
    for (int k = 0; k < m; ++k) xm = g.apply(f, xm);
    Vector xn = xm;
    for (int k = m; k < n; ++k) xn = g.apply(f, xn);
    BoundCheck out;
    out.word = f;
    out.ratio = rho;
    out.measured = g.distance(xm, xn);
    out.bound = g.distance(x, g.apply(f, x)) * std::pow(rho, m) / (1.0 - rho);
    return out;
}

BoundCheck contraction_check(const HomothetyGroup& g, const Vector& x, const Word& f) {
    BoundCheck out;
    out.word = f;
    out.ratio = g.ratio(f);
    if (!(out.ratio < 1.0)) throw ArgumentError("contraction_check needs a contracting word");
    out.measured = g.distance(x, g.apply(f, x));
    out.bound = k_bound(g, x);
    return out;
}

std::vector<Word> random_contracting_words(const HomothetyGroup& g, std::size_t count, long max_exponent,
                                           std::uint64_t seed) {
    if (max_exponent < 1) throw ArgumentError("max_exponent must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> pick(-max_exponent, max_exponent);
    std::vector<Word> out;
    while (out.size() < count) {
        std::vector<long> e(g.size());
        for (auto& a : e) a = pick(rng);
        Word w = word_from_exponents(e);
        if (g.ratio(w) < 1.0) out.push_back(std::move(w));
    }
    return out;
}

Reduction reduce_to_domain(const HomothetyGroup& g, const FundamentalDomain& omega, const Vector& x,
                           std::size_t budget) {
    Reduction red;
    red.image = x;
    std::size_t letters = 0;
    auto push = [&](int gen, long e) {
        if (!red.word.empty() && red.word.front().generator == gen && (red.word.front().exponent > 0) == (e > 0))
            red.word.front().exponent += e;
        else
            red.word.insert(red.word.begin(), Letter{gen, e});
    };
    while (!omega.contains(red.image)) {
        if (++letters > budget)
            throw CoverageError("point not reduced to the fundamental domain within " + std::to_string(budget) +
                                " letters");
        const double L = omega.level(red.image);
        if (L >= omega.lo && L < omega.hi)
            throw CoverageError("point lies in the level band of the fundamental domain but outside it");
        const bool up = L < omega.lo;
        // Largest step that does not overshoot the band, else the smallest step.
        int best = -1;
        double best_step = 0.0;
        int smallest = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double step = std::log(g.generators()[i].ratio);
            if (step < std::log(g.generators()[static_cast<std::size_t>(smallest)].ratio)) smallest = static_cast<int>(i);
            const double next = up ? L + step : L - step;
            const bool overshoot = up ? next >= omega.hi : next < omega.lo;
            if (!overshoot && step > best_step) {
                best = static_cast<int>(i);
                best_step = step;
            }
        }
        if (best < 0) best = smallest;
        const Generator& h = g.generators()[static_cast<std::size_t>(best)];
        red.image = up ? h.forward(red.image) : h.inverse(red.image);
        push(best, up ? 1 : -1);
    }
    return red;
}

EquivariantExtension::EquivariantExtension(HomothetyGroup g, FundamentalDomain omega,
                                           std::function<double(const Vector&)> values, std::size_t budget)
    : g_(std::move(g)), omega_(std::move(omega)), values_(std::move(values)), budget_(budget) {
    if (!omega_.contains || !omega_.level) throw ArgumentError("fundamental domain needs contains and level");
    if (!values_) throw ArgumentError("equivariant extension needs values on the domain");
}

double EquivariantExtension::operator()(const Vector& x) const {
    const Reduction r = reduce(x);
    return values_(r.image) / g_.ratio(r.word);
}

EquivariantExtension equivariant_extend(const HomothetyGroup& g, const FundamentalDomain& omega,
                                        std::function<double(const Vector&)> values, std::size_t budget) {
    return EquivariantExtension(g, omega, std::move(values), budget);
}

BallInclusion ball_inclusion_check(const Vector& x, double r, const SingularityModel& model,
                                   const std::function<std::vector<Vector>(const Vector&, double)>& g_sphere,
                                   const DistanceFn& distance0) {
    if (!(r > 0.0)) throw ArgumentError("ball radius must be positive");
    BallInclusion out;
    out.r_tilde = r / (model.k2 * (model.delta(x) + r));
    for (const auto& y : g_sphere(x, (1.0 - 1e-9) * out.r_tilde)) {
        ++out.samples;
        const double d0 = distance0(x, y);
        out.max_ratio = std::max(out.max_ratio, d0 / r);
        if (!(d0 < r)) ++out.violations;
    }
    return out;
}

Disjointness disjointness_scan(const std::function<Vector(double)>& gamma, double rho, double q, int n_max,
                               const DistanceFn& distance) {
    if (!(q > 0.0 && q < 1.0)) throw ArgumentError("disjointness scan needs 0 < q < 1");
    std::vector<Vector> centers;
    std::vector<double> radii;
    for (int n = 1; n <= n_max; ++n) {
        const double t = std::pow(q, n);
        centers.push_back(gamma(t));
        radii.push_back(rho * t);
    }
    Disjointness out;
    out.balls = centers.size();
    out.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            out.min_gap = std::min(out.min_gap, distance(centers[i], centers[j]) - radii[i] - radii[j]);
    return out;
}

double disjointness_q_limit(const SingularityModel& model, double rho) {
    if (!(rho > 0.0 && rho < model.kappa)) throw ArgumentError("disjointness needs 0 < rho < kappa");
    return model.k1 * (model.kappa - rho) / (model.k2 * (rho + 1.0));
}

ShootingDistance shooting_distance(const ChartMetric& metric, const Vector& x, const Vector& y, int restarts,
                                   std::uint64_t seed) {
    if (restarts < 1) throw ArgumentError("shooting needs at least one start");
    const WeylStructure lc = WeylStructure::levi_civita(metric);
    GeodesicOptions opt;
    opt.tol = 1e-11;
    opt.store_dense = false;
    auto miss = [&](const Vector& V) {
        try {
            return (exp_map(lc, x, V, opt) - y).squaredNorm();
        } catch (const IncompletenessError&) {
            return 1e6 + V.squaredNorm();
        } catch (const ArgumentError&) {
            return 1e6 + V.squaredNorm();
        }
    };
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    const Vector guess = y - x;
    const double scale = std::max(guess.norm(), 1e-12);
    ShootingDistance best;
    best.residual = std::numeric_limits<double>::infinity();
    best.distance = std::numeric_limits<double>::infinity();
    const Matrix g = metric_at(metric, x);
    for (int k = 0; k < restarts; ++k) {
        Vector start = guess;
        if (k > 0)
            for (Eigen::Index i = 0; i < start.size(); ++i) start[i] += 0.3 * scale * n01(rng);
        const MinimumND m = minimize_nd(miss, start, 0.1 * scale, 400, 1e-14);
        const double res = std::sqrt(m.value);
        const double len = std::sqrt(m.x.dot(g * m.x));
        const bool converged = res < 1e-6 * std::max(1.0, scale);
        const bool best_converged = best.residual < 1e-6 * std::max(1.0, scale);
        if ((converged && (!best_converged || len < best.distance)) || (!best_converged && res < best.residual)) {
            best.distance = len;
            best.residual = res;
        }
    }
    return best;
}

}  // namespace weyllab
