#pragma once

#include <limits>
#include <string>

namespace schedkl {

// Noise-schedule families for the Gaussian reverse-sampling analysis.
//
// Every schedule is a pair (alpha(t), sigma(t)) on t in [0,1] with alpha
// decreasing from 1 and sigma increasing from 0 (VE keeps alpha == 1 and
// ramps sigma from sigma_min to sigma_max). The noise-to-signal ratio
// eta(t) = sigma/alpha is strictly increasing, and the half-logSNR
// lambda(t) = log(alpha/sigma) strictly decreasing.
enum class Family {
    VpCosine,     // alpha = cos(pi t/2), sigma = sin(pi t/2)
    VeGeometric,  // alpha = 1, sigma = sigma_min * (sigma_max/sigma_min)^t
    TangentLaw,   // eta = sqrt(gamma) * tan(Theta t), variance preserving
    DdpmLinear,   // linear-beta VP parameterization, beta in [beta0, beta1]
    FlowLinear,   // alpha = 1 - t, sigma = t
};

// Initialization convention for the reverse sampler: VP starts from a unit
// Gaussian, VE from N(0, sigma(t_start)^2 I).
enum class Setting { Vp, Ve };

// Values and first/second time derivatives of (alpha, sigma) at one t.
// Derivative fields may be IEEE infinities where the analytic derivative
// diverges (DDPM sigma_dot at t = 0).
struct SchedulePoint {
    double t = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
    double alpha_dot = 0.0;
    double sigma_dot = 0.0;
    double alpha_ddot = 0.0;
    double sigma_ddot = 0.0;
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Immutable description of one noise schedule. All member functions are
// pure; instances are safe to share across threads.
class NoiseSchedule {
public:
    static NoiseSchedule vp_cosine();
    static NoiseSchedule ve_geometric(double sigma_min = 0.01, double sigma_max = 80.0);
    // Variance-preserving tangent law with coefficient gamma > 0 and terminal
    // noise-to-signal ratio eta1 in (0, +inf]; eta1 = +inf is the boundary
    // limit and gives Theta = pi/2.
    static NoiseSchedule tangent(double gamma, double eta1 = kInfinity);
    static NoiseSchedule ddpm_linear(double beta0 = 0.1, double beta1 = 20.0);
    static NoiseSchedule flow_linear();

    Family family() const { return family_; }
    Setting setting() const { return family_ == Family::VeGeometric ? Setting::Ve : Setting::Vp; }
    // Short stable identifier used in CSV output and file names.
    std::string name() const;

    // Full evaluation with derivatives. Throws std::domain_error for t
    // outside [0,1], and for the tangent law with eta1 = +inf at exactly
    // t = 1 (eta diverges there).
    SchedulePoint eval(double t) const;

    // (alpha, sigma) only, defined on all of [0,1] via the continuous
    // extension at endpoints where eval() refuses; exact endpoint values
    // (1,0) and (0,1) are returned without rounding for the families that
    // attain them, so degenerate-step products come out exactly zero.
    void values(double t, double* alpha, double* sigma) const;

    // lambda(t) = log(alpha/sigma). The argument is clamped to the interior
    // domain [t_min, t_max] first; lambda diverges at the exact endpoints of
    // the VP-like families.
    double half_logsnr(double t) const;

    // Inverse of half_logsnr. Closed form for the cosine and VE families,
    // monotone bisection (absolute tolerance 1e-12 in t) otherwise. Throws
    // std::out_of_range when lambda is outside the attainable interval
    // [half_logsnr(t_max), half_logsnr(t_min)].
    double invert_lambda(double lambda) const;

    // Interior domain used by the lambda-based operations.
    double t_min() const;
    double t_max() const;
    // Attainable half-logSNR interval (lambda is decreasing in t).
    double lambda_min() const { return half_logsnr(t_max()); }
    double lambda_max() const { return half_logsnr(t_min()); }

    // Default grid boundaries for experiment drivers: VP-like families clip
    // to [1e-3, 1-1e-3] (where their lambda range is representative of
    // pretrained-model schedules), VE uses the full [0,1].
    double default_t_lo() const;
    double default_t_hi() const;

    // Family parameters; meaningful fields depend on family().
    double gamma() const { return gamma_; }
    double eta1() const { return eta1_; }
    double theta() const { return theta_; }
    double sigma_min() const { return sigma_min_; }
    double sigma_max() const { return sigma_max_; }
    double beta0() const { return beta0_; }
    double beta1() const { return beta1_; }

private:
    NoiseSchedule() = default;

    Family family_ = Family::VpCosine;
    double gamma_ = 1.0;
    double eta1_ = kInfinity;
    double theta_ = 0.0;  // arctan(eta1/sqrt(gamma)), pi/2 for eta1 = +inf
    double sigma_min_ = 0.01;
    double sigma_max_ = 80.0;
    double beta0_ = 0.1;
    double beta1_ = 20.0;
};

// Factory matching the tangent-law constructor; kept as a free function for
// call sites that read better with a verb.
NoiseSchedule tangent_schedule(double gamma, double eta1 = kInfinity);

}  // namespace schedkl
