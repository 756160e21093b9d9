#pragma once

#include <map>
#include <string>
#include <vector>

#include "lab/warped.hpp"

namespace lab {

/// m_j(r) = sqrt(2c/3) cos(theta(r) + 2 pi j / 3); sum m_j = 0, sum m_j^2 = c.
class CircleCurve {
public:
    CircleCurve(double c, ProfilePtr theta) : c_(c), theta_(std::move(theta)) {}
    double c() const { return c_; }
    double radius() const;  ///< sqrt(2c/3)
    /// Jet in r of m_j.
    Jet component(int j, double r) const;
    std::array<double, 3> values(double r) const;
    const ProfilePtr& theta() const { return theta_; }

private:
    double c_;
    ProfilePtr theta_;
};

/// theta(r) = base + amp * smoothstep((r - lo)/(hi - lo)); theta' supported in [lo, hi].
ProfilePtr smooth_ramp_angle(double base, double amp, double lo, double hi);

/// Bound b |cot s| / (log(-log(s0 sin s)) (-log(s0 sin s))) with derivative.
ProfilePtr cot_loglog_bound(double b, double s0);

/// Monotone C^2 cutoff: 0 off [lo, hi], 1 on [plo, phi], ramps built from a derivative
/// bound. The ramp derivative is bound(s) T(s) / I with T a C^1 taper and I its
/// integral over the ramp, so |psi'| <= bound whenever I >= 1.
class Cutoff : public Profile {
public:
    struct Ramp {
        double lo = 0, hi = 0;
        bool rising = true;
        double taper = 0.5;  ///< fraction of the ramp spent in each taper end
        double integral = 0;
        std::vector<double> cum;  ///< cumulative integrals at segment ends
    };

    Cutoff(ProfilePtr bound, double lo, double plo, double phi, double hi);
    Jet eval(double s) const override;
    const std::vector<Ramp>& ramps() const { return ramps_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double plateau_lo() const { return plo_; }
    double plateau_hi() const { return phi_; }

    Ramp make_ramp(double a, double b, bool rising, double taper) const;
    void set_ramps(std::vector<Ramp> r) { ramps_ = std::move(r); }

private:
    double weight(const Ramp& R, double s) const;  // bound * taper
    double ramp_value(const Ramp& R, double s) const;
    ProfilePtr bound_;
    double lo_, plo_, phi_, hi_;
    std::vector<Ramp> ramps_;
};

using CutoffPtr = std::shared_ptr<const Cutoff>;

/// Builds a cutoff satisfying |psi'| <= bound1 and |psi''| <= bound2 pointwise.
/// Tries taper fractions from smooth to sharp; throws InfeasibleError when the
/// bound integral over a ramp stays below 1 or no taper meets bound2.
CutoffPtr build_cutoff(ProfilePtr bound1, ProfilePtr bound2, double lo, double plo, double phi,
                       double hi);

// -------------------------------------------------------------------- Example A

struct ConstantsA {
    double a0 = 0.5, a1 = 0.005, r0 = 0.1;
    double b1 = 0.3, s0 = 0.05;
    double a2 = 1.0, b2 = 2.0;
    double m0 = 1.0, c = 0.01, t0 = 0.05;
    double theta_amp = 0.3;  ///< total rotation of the circle curve over [1/2, 1]
};

/// m_j(r, s) = psi(s) mu_j(r) - 2 m0.
class ExampleAFiber : public MetricFunctions {
public:
    ExampleAFiber(CircleCurve curve, CutoffPtr psi, double m0)
        : curve_(std::move(curve)), psi_(std::move(psi)), m0_(m0) {}
    FiberJet eval(double r, double s) const override;
    const CircleCurve& curve() const { return curve_; }
    const CutoffPtr& cutoff() const { return psi_; }
    double m0() const { return m0_; }

private:
    CircleCurve curve_;
    CutoffPtr psi_;
    double m0_;
};

WarpedMetric build_example_A(const ConstantsA& k);

// -------------------------------------------------------------------- Example B

struct ConstantsB {
    double delta = 0.2;
    int N = 3;
    double c = 0.001, theta0 = 1.0, m0 = 1.0;
    double b1 = 0.3, s0 = 0.1;
    double a2 = 5.0, b2 = 3.0;
    double K = 1.0;      ///< t_i = exp(-K 2^i)
    double w = 1e-3;     ///< mollification half-width of a(r) at r = 1
};

/// Odd C^2 smoothing of sign(x)|x|^kappa inside |x| < eps.
class HolderAngle : public Profile {
public:
    HolderAngle(double theta0, double kappa, double eps);
    Jet eval(double r) const override;  // argument is r, centered at r = 1
    double eps() const { return eps_; }
    /// Bounds max |sigma'| eps^{1-kappa}, max |sigma''| eps^{2-kappa} over all x.
    double max_d1_coeff() const { return M1_; }
    double max_d2_coeff() const { return M2_; }

private:
    double theta0_, kappa_, eps_;
    double al1_, al3_, al5_, M1_, M2_;
};

/// m_{Nj}(r,s) = sum_i psi_i(s) m_{ij}(r) - mbar.
class ExampleBFiber : public MetricFunctions {
public:
    ExampleBFiber(std::vector<CircleCurve> curves, std::vector<CutoffPtr> psi, double mbar)
        : curves_(std::move(curves)), psi_(std::move(psi)), mbar_(mbar) {}
    FiberJet eval(double r, double s) const override;
    const std::vector<CutoffPtr>& cutoffs() const { return psi_; }
    const std::vector<CircleCurve>& curves() const { return curves_; }

private:
    std::vector<CircleCurve> curves_;
    std::vector<CutoffPtr> psi_;
    double mbar_;
};

/// Scale sequence t_0, ..., t_{N+1}.
std::vector<double> scale_sequence(double K, int N);

/// Unsmoothed limit curve m_j(r) of the second example.
CircleCurve example_B_limit_curve(const ConstantsB& k);

WarpedMetric build_example_B(const ConstantsB& k);

/// Innermost support edge of the Example-B cutoffs (the t0 used by the positivity conditions).
double example_B_t0(const ConstantsB& k);

// -------------------------------------------------------------------- certification

struct ConditionResult {
    std::string name;
    double max_violation = 0;  ///< max over the grid of lhs - rhs; <= 0 passes
    double r = 0, s = 0;       ///< location of the max
    bool pass() const { return max_violation <= 1e-12; }
};

struct PositivityReport {
    std::vector<ConditionResult> conditions;
    MinRicci min_ricci;
    bool all_pass() const;
};

PositivityReport verify_positivity_conditions(const WarpedMetric& W, const ConstantsA& k,
                                              const Grid2& grid);
PositivityReport verify_positivity_conditions(const WarpedMetric& W, const ConstantsB& k,
                                              const Grid2& grid);

/// Certification grids: uniform, singular-ray margin t0/8.
Grid2 certification_grid_A(const ConstantsA& k, int n = 50);
Grid2 certification_grid_B(const ConstantsB& k, int n = 50);

// -------------------------------------------------------------------- serialization

using KeyValues = std::map<std::string, std::string>;

KeyValues to_keyvalues(const ConstantsA& k);
KeyValues to_keyvalues(const ConstantsB& k);
ConstantsA constants_A_from(const KeyValues& kv);
ConstantsB constants_B_from(const KeyValues& kv);

/// Canonical constants pinned for reproducibility.
ConstantsA canonical_A();
ConstantsB canonical_B();

}  // namespace lab

namespace lab {

/// One row of the constant search for the first example.
struct SearchRowA {
    ConstantsA k;
    bool feasible = false;
    bool conditions_pass = false;
    double min_ricci = 0;  ///< on the certification grid
    double score = 0;      ///< min over grid of r^2 * eigenvalue (radial term only on [t0, 1])
    double score_angular = 0;  ///< same without the radial term
    double control_min = 0;  ///< min eigenvalue with a1 scaled by 100
};

/// Scans (a1, b1, s0) with a0, c, m0, t0 fixed; a2 and b2 set to the smallest listed
/// values passing their conditions.
std::vector<SearchRowA> grid_search_A(const ConstantsA& base, const std::vector<double>& a1s,
                                      const std::vector<double>& b1s,
                                      const std::vector<double>& s0s);

/// Highest score among rows whose conditions pass and whose control goes negative;
/// ties broken by the angular score. nullptr if none qualifies.
const SearchRowA* best_row(const std::vector<SearchRowA>& rows);

}  // namespace lab
