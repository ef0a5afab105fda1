#include "weyllab/holonomy.hpp"

#include "weyllab/ode.hpp"
#include "weyllab/parallel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace weyllab {

Path Path::polyline(const std::vector<Vector>& points) {
    if (points.size() < 2) throw ArgumentError("a polyline needs at least two points");
    std::vector<PathSegment> segs;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const Vector a = points[i], b = points[i + 1];
        segs.push_back({[a, b](double s) -> Vector { return a + s * (b - a); },
                        [a, b](double) -> Vector { return b - a; }, "segment"});
    }
    return Path(std::move(segs));
}

Path Path::arc(const Vector& center, const Vector& e1, const Vector& e2, double radius, double a0, double a1) {
    const double span = a1 - a0;
    PathSegment seg{
        [=](double s) -> Vector {
            const double a = a0 + s * span;
            return center + radius * (std::cos(a) * e1 + std::sin(a) * e2);
        },
        [=](double s) -> Vector {
            const double a = a0 + s * span;
            return radius * span * (-std::sin(a) * e1 + std::cos(a) * e2);
        },
        "arc"};
    return Path({seg});
}

Path Path::then(const Path& next) const {
    std::vector<PathSegment> segs = segments_;
    segs.insert(segs.end(), next.segments_.begin(), next.segments_.end());
    return Path(std::move(segs));
}

Path Path::reversed() const {
    std::vector<PathSegment> segs;
    for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
        auto pos = it->position;
        auto vel = it->velocity;
        segs.push_back({[pos](double s) { return pos(1.0 - s); }, [vel](double s) -> Vector { return -vel(1.0 - s); },
                        it->label + "^-1"});
    }
    return Path(std::move(segs));
}

Vector Path::start() const {
    if (segments_.empty()) throw ArgumentError("empty path");
    return segments_.front().position(0.0);
}

Vector Path::end() const {
    if (segments_.empty()) throw ArgumentError("empty path");
    return segments_.back().position(1.0);
}

std::vector<Vector> Path::sample(int per_segment) const {
    std::vector<Vector> out;
    for (const auto& s : segments_)
        for (int k = 0; k <= per_segment; ++k) out.push_back(s.position(static_cast<double>(k) / per_segment));
    return out;
}

std::string Path::label() const {
    std::string out;
    for (std::size_t i = 0; i < segments_.size(); ++i) out += (i ? "+" : "") + segments_[i].label;
    return out;
}

namespace {

void require_clear(const ChartMetric& chart, const Vector& x) {
    for (const auto& c : chart.constraints()) {
        const double m = c.margin(x);
        if (m <= c.guard || (c.kind != LocusKind::boundary && m <= 0.0))
            throw SingularityError("path enters the guard band of '" + c.name + "'");
    }
}

}  // namespace

Matrix parallel_transport(const WeylStructure& w, const Path& path, double tol, const FiniteDifference& fd) {
    const int n = w.dim();
    Matrix P = Matrix::Identity(n, n);
    for (const auto& seg : path.segments()) {
        require_clear(w.reference(), seg.position(0.0));
        ode::Rhs rhs = [&](double s, const Vector& y, Vector& dy) {
            const Vector x = seg.position(s);
            require_clear(w.reference(), x);
            const Matrix A = weyl_christoffel(w, x, fd).along(seg.velocity(s));
            const Eigen::Map<const Matrix> V(y.data(), n, n);
            Eigen::Map<Matrix> dV(dy.data(), n, n);
            dV = -A * V;
        };
        ode::Options opt;
        opt.rtol = tol;
        opt.atol = tol;
        opt.store_dense = false;
        const Vector y0 = Eigen::Map<const Vector>(P.data(), n * n);
        const ode::Result r = ode::dopri5(rhs, 0.0, y0, 1.0, opt);
        if (r.status != ode::Status::reached_end)
            throw SingularityError("parallel transport failed along '" + seg.label + "': " + r.failure);
        P = Eigen::Map<const Matrix>(r.y.data(), n, n);
    }
    return P;
}

Matrix orthonormal_frame(const WeylStructure& w, const Vector& x) {
    const Matrix g = metric_at(w.reference(), x);
    const Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw DomainError("positive-definite", "metric is not positive definite");
    const Matrix L = llt.matrixL();
    return L.transpose().inverse();
}

Matrix holonomy_element(const WeylStructure& w, const Path& loop, double tol) {
    const Vector a = loop.start(), b = loop.end();
    if ((a - b).norm() > 1e-9 * std::max(1.0, a.norm())) throw ArgumentError("holonomy needs a closed loop");
    const Matrix E = orthonormal_frame(w, a);
    return E.inverse() * parallel_transport(w, loop, tol) * E;
}

HolonomySample holonomy_scan(const WeylStructure& w, const Vector& base, const LoopFamily& family, int n,
                             std::uint64_t seed, unsigned workers, double tol) {
    if (n <= 0) throw ArgumentError("holonomy scan needs a positive loop count");
    const int dim = w.dim();
    if (dim < 2) throw ArgumentError("holonomy scan needs dimension at least 2");
    const ChartMetric& chart = w.reference();
    if (!chart.contains(base)) throw ArgumentError("base point outside the chart domain");

    HolonomySample out;
    out.base = base;
    out.frame = orthonormal_frame(w, base);
    out.elements.resize(static_cast<std::size_t>(n));
    out.loops.resize(static_cast<std::size_t>(n));

    auto clear = [&](const Vector& x) {
        for (const auto& c : chart.constraints()) {
            const double m = c.margin(x);
            if (m <= std::max(10.0 * c.guard, 1e-9)) return false;
        }
        return true;
    };

    parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (i + 1));
        std::normal_distribution<double> n01;
        std::uniform_real_distribution<double> u01(0.2, 1.0);
        auto gaussian = [&] {
            Vector v(dim);
            for (int k = 0; k < dim; ++k) v[k] = n01(rng);
            return v;
        };
        for (int attempt = 0; attempt < family.max_attempts; ++attempt) {
            Vector d = gaussian();
            d.normalize();
            const Vector c = base + family.reach * u01(rng) * d;
            if (!chart.contains(c)) continue;
            const double r = family.radius * chart.scale(c);
            Vector e1 = gaussian();
            e1.normalize();
            Vector e2 = gaussian();
            e2 -= e2.dot(e1) * e1;
            if (e2.norm() < 1e-8) continue;
            e2.normalize();
            const Vector p = c + r * e1;
            const Path loop = Path::polyline({base, p})
                                  .then(Path::arc(c, e1, e2, r, 0.0, 2.0 * std::numbers::pi))
                                  .then(Path::polyline({p, base}));
            const auto pts = loop.sample(32);
            if (!std::all_of(pts.begin(), pts.end(), clear)) continue;
            out.elements[i] = holonomy_element(w, loop, tol);
            std::ostringstream os;
            os.precision(6);
            os << "lasso centre=(";
            for (int k = 0; k < dim; ++k) os << (k ? "," : "") << c[k];
            os << ") radius=" << r;
            out.loops[i] = os.str();
            return;
        }
        throw ArgumentError("could not place a lasso loop inside the domain");
    });
    for (const auto& A : out.elements)
        out.orthogonality_residual =
            std::max(out.orthogonality_residual, (A.transpose() * A - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff());
    return out;
}

Matrix full_holonomy_element(const WeylStructure& w, const Path& path, const DeckTransformation& h, double tol) {
    const Vector x = path.start();
    const Vector hx = h.map(x);
    if ((path.end() - hx).norm() > 1e-9 * std::max(1.0, hx.norm()))
        throw ArgumentError("path must end at the image of its start under the deck transformation");
    Matrix J;
    if (h.jacobian) {
        J = h.jacobian(x);
    } else {
        const int n = w.dim();
        J.resize(n, n);
        const double step = 1e-6 * std::max(1.0, x.norm());
        for (int a = 0; a < n; ++a) {
            Vector xp = x, xm = x;
            xp[a] += step;
            xm[a] -= step;
            J.col(a) = (h.map(xp) - h.map(xm)) / (2.0 * step);
        }
    }
    const Matrix E = orthonormal_frame(w, x);
    return E.inverse() * J.inverse() * parallel_transport(w, path, tol) * E;
}

std::string to_string(HolonomyLabel l) {
    switch (l) {
        case HolonomyLabel::trivial: return "trivial";
        case HolonomyLabel::reducible: return "reducible";
        case HolonomyLabel::irreducible_generic: return "irreducible-generic";
        case HolonomyLabel::complex_candidate: return "complex-structure-preserving-candidate";
    }
    return "unknown";
}

namespace {

// Basis of {X : AX = XA for all A}, X symmetric (skew when `skew`), as m×m matrices.
std::vector<Matrix> commutant(const std::vector<Matrix>& elements, int m, bool skew, double tol) {
    std::vector<Matrix> unit;
    for (int i = 0; i < m; ++i)
        for (int j = skew ? i + 1 : i; j < m; ++j) {
            Matrix E = Matrix::Zero(m, m);
            E(i, j) = 1.0;
            E(j, i) = skew ? -1.0 : 1.0;
            if (i == j) E(i, i) = 1.0;
            unit.push_back(E / E.norm());
        }
    if (unit.empty()) return {};
    const auto p = static_cast<Eigen::Index>(unit.size());
    Matrix M(static_cast<Eigen::Index>(elements.size()) * m * m, p);
    for (Eigen::Index c = 0; c < p; ++c) {
        Eigen::Index row = 0;
        for (const auto& A : elements) {
            const Matrix C = A * unit[static_cast<std::size_t>(c)] - unit[static_cast<std::size_t>(c)] * A;
            for (Eigen::Index k = 0; k < C.size(); ++k) M(row++, c) = C.data()[k];
        }
    }
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    double scale = 0.0;
    for (const auto& A : elements) scale = std::max(scale, A.norm());
    const double cutoff = tol * std::max(1.0, scale);
    std::vector<Matrix> out;
    for (Eigen::Index c = 0; c < p; ++c) {
        const double sv = c < s.size() ? s[c] : 0.0;
        if (sv > cutoff) continue;
        Matrix X = Matrix::Zero(m, m);
        for (Eigen::Index k = 0; k < p; ++k) X += svd.matrixV()(k, c) * unit[static_cast<std::size_t>(k)];
        out.push_back(X);
    }
    return out;
}

void split(const std::vector<Matrix>& elements, const Matrix& B, double tol, std::mt19937_64& rng,
           std::vector<Matrix>& blocks) {
    const auto m = static_cast<int>(B.cols());
    if (m == 1) {
        blocks.push_back(B);
        return;
    }
    std::vector<Matrix> restricted;
    restricted.reserve(elements.size());
    for (const auto& A : elements) restricted.push_back(B.transpose() * A * B);
    const auto basis = commutant(restricted, m, false, tol);
    if (basis.size() <= 1) {
        blocks.push_back(B);
        return;
    }
    std::normal_distribution<double> n01;
    Matrix X = Matrix::Zero(m, m);
    for (const auto& N : basis) X += n01(rng) * N;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (X + X.transpose()));
    const Vector& ev = es.eigenvalues();
    const double spread = ev.maxCoeff() - ev.minCoeff();
    if (!(spread > 0.0)) {
        blocks.push_back(B);
        return;
    }
    const double gap = 1e-3 * spread;
    int begin = 0;
    for (int k = 1; k <= m; ++k) {
        if (k == m || ev[k] - ev[k - 1] > gap) {
            const Matrix sub = B * es.eigenvectors().middleCols(begin, k - begin);
            if (k - begin == m) {
                blocks.push_back(B);
                return;
            }
            split(elements, sub, tol, rng, blocks);
            begin = k;
        }
    }
}

}  // namespace

Decomposition invariant_subspaces(const std::vector<Matrix>& elements, double tol) {
    if (elements.size() < 2) throw ArgumentError("invariant subspace detection needs at least two elements");
    const auto n = static_cast<int>(elements.front().rows());
    Decomposition out;
    const Matrix I = Matrix::Identity(n, n);
    bool trivial = true;
    for (const auto& A : elements) trivial = trivial && (A - I).cwiseAbs().maxCoeff() < tol;
    if (trivial) {
        out.trivial = true;
        out.dims = {n};
        out.bases = {I};
        out.label = HolonomyLabel::trivial;
        return out;
    }
    std::mt19937_64 rng(0x5EED);
    std::vector<Matrix> blocks;
    split(elements, I, tol, rng, blocks);
    std::stable_sort(blocks.begin(), blocks.end(), [](const Matrix& a, const Matrix& b) { return a.cols() > b.cols(); });
    for (const auto& B : blocks) {
        out.dims.push_back(static_cast<int>(B.cols()));
        out.bases.push_back(B);
        const Matrix P = B * B.transpose();
        for (const auto& A : elements) out.residual = std::max(out.residual, ((I - P) * A * P).norm());
    }
    if (blocks.size() > 1) {
        out.label = HolonomyLabel::reducible;
        return out;
    }
    out.label = HolonomyLabel::irreducible_generic;
    if (n % 2 == 0) {
        auto skew = commutant(elements, n, true, tol);
        std::normal_distribution<double> n01;
        if (skew.size() > 1) {
            Matrix mix = Matrix::Zero(n, n);
            for (const auto& S : skew) mix += n01(rng) * S;
            skew.push_back(mix);
        }
        for (const auto& S : skew) {
            const double c2 = -(S * S).trace() / n;
            if (!(c2 > 0.0)) continue;
            const Matrix J = S / std::sqrt(c2);
            if ((J * J + I).cwiseAbs().maxCoeff() < 10.0 * tol) {
                out.complex_structure = J;
                out.label = HolonomyLabel::complex_candidate;
                break;
            }
        }
    }
    return out;
}

Decomposition invariant_subspaces(const HolonomySample& sample, double tol) {
    return invariant_subspaces(sample.elements, tol);
}

FlatnessCertificate flatness_certificate(const WeylStructure& w, const std::vector<Vector>& points, double threshold,
                                         const FiniteDifference& fd) {
    if (points.empty()) throw ArgumentError("flatness certificate needs sample points");
    FlatnessCertificate out;
    for (const auto& x : points) {
        // Richardson step: the nested central differences carry an O(h²)
        // error that would otherwise dominate on flat metrics.
        FiniteDifference coarse = fd;
        coarse.rel_step *= 2.0;
        const Riemann Rh = weyl_riemann(w, x, fd), R2h = weyl_riemann(w, x, coarse);
        Riemann R(Rh.dim());
        const int n = Rh.dim();
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) R(l, k, i, j) = (4.0 * Rh(l, k, i, j) - R2h(l, k, i, j)) / 3.0;
        const double s = w.reference().scale(x);
        const double norm = std::sqrt(std::max(0.0, curvature_norm(R, metric_at(w.reference(), x)))) * s * s;
        if (norm >= out.max_norm) {
            out.max_norm = norm;
            out.argmax = x;
        }
    }
    out.flat = out.max_norm < threshold;
    return out;
}

}  // namespace weyllab
