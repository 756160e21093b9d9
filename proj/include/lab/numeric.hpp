#pragma once

#include <array>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

constexpr double kPi = 3.14159265358979323846;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Value and first two derivatives of a scalar function of one variable.
struct Jet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussRule& gauss_legendre(int n);

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
double integrate(const std::function<double(double)>& f, double a, double b, int n = 24);

/// Composite Gauss-Legendre over `pieces` equal subintervals.
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int pieces, int n = 16);

/// Deterministic random source. All sampling in the library goes through this.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
    }
    std::uint64_t next() { return eng_(); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

/// Least squares line y = slope*x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  ///< RMS residual
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Smooth step on [0,1] with vanishing first three derivatives at both ends.
double smoothstep7(double u);
double smoothstep7_d1(double u);
double smoothstep7_d2(double u);

}  // namespace lab

namespace lab {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_jobs(int jobs);
int jobs();

/// Runs f(i) for i in [0, n) on the worker pool. Each index is visited exactly once;
/// results must be written to per-index slots for determinism.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace lab
