#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace weyllab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMaxDim = 8;

/// Connection coefficients Γᵏᵢⱼ stored as a dense dim³ block, upper index first.
class Christoffel {
public:
    Christoffel() = default;
    explicit Christoffel(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

    int dim() const { return dim_; }

    double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }
    double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }

    /// Γᵏᵢⱼ vⁱ wʲ
    Vector contract(const Vector& v, const Vector& w) const {
        Vector out = Vector::Zero(dim_);
        for (int k = 0; k < dim_; ++k) {
            double acc = 0.0;
            for (int i = 0; i < dim_; ++i) {
                if (v[i] == 0.0) continue;
                for (int j = 0; j < dim_; ++j) acc += (*this)(k, i, j) * v[i] * w[j];
            }
            out[k] = acc;
        }
        return out;
    }

    /// Matrix Aᵏⱼ = Γᵏᵢⱼ vⁱ (the connection one-form evaluated on v).
    Matrix along(const Vector& v) const {
        Matrix out = Matrix::Zero(dim_, dim_);
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j) out(k, j) += (*this)(k, i, j) * v[i];
        return out;
    }

    /// max |Γᵏᵢⱼ − Γᵏⱼᵢ|
    double torsion() const {
        double worst = 0.0;
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i)
                for (int j = i + 1; j < dim_; ++j)
                    worst = std::max(worst, std::abs((*this)(k, i, j) - (*this)(k, j, i)));
        return worst;
    }

    double max_abs_diff(const Christoffel& other) const {
        double worst = 0.0;
        for (std::size_t n = 0; n < data_.size(); ++n)
            worst = std::max(worst, std::abs(data_[n] - other.data_[n]));
        return worst;
    }

    const std::vector<double>& raw() const { return data_; }

private:
    std::size_t index(int k, int i, int j) const {
        return static_cast<std::size_t>((k * dim_ + i) * dim_ + j);
    }

    int dim_ = 0;
    std::vector<double> data_;
};

// Error taxonomy shared by all modules.

/// Invalid caller-supplied arguments.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A point lies outside the chart domain; carries the violated predicate.
class DomainError : public std::domain_error {
public:
    DomainError(const std::string& predicate, const std::string& what)
        : std::domain_error(what), predicate_(predicate) {}
    const std::string& predicate() const { return predicate_; }

private:
    std::string predicate_;
};

/// Metric too close to singular for finite differencing.
class ConditioningError : public std::runtime_error {
public:
    ConditioningError(double condition, const std::string& what)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

/// The geodesic dies before the requested parameter.
class IncompletenessError : public std::runtime_error {
public:
    IncompletenessError(double lifetime, const std::string& what)
        : std::runtime_error(what), lifetime_(lifetime) {}
    double lifetime() const { return lifetime_; }

private:
    double lifetime_;
};

/// A path entered the guard band of a declared singular locus.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point could not be reduced to the fundamental domain within budget.
class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A catalog constructor was given parameters violating its constraints.
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration; `field` names the offending key path and `line`
/// (1-based, 0 when unknown) the source line it came from.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what, int line = 0, int column = 0)
        : std::runtime_error(format(field, what, line, column)), field_(field), line_(line), column_(column) {}
    const std::string& field() const { return field_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& field, const std::string& what, int line, int column) {
        std::string out;
        if (line > 0) out = "line " + std::to_string(line) + (column > 0 ? ":" + std::to_string(column) : "") + ": ";
        if (!field.empty()) out += field + ": ";
        return out + what;
    }
    std::string field_;
    int line_ = 0;
    int column_ = 0;
};

}  // namespace weyllab
