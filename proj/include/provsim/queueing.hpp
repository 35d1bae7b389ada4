#pragma once

#include "provsim/domain.hpp"

namespace provsim::queueing {

// Erlang-B blocking probability for M circuits and offered load a.
double erlang_b(int m, double a);

// M/M/n delay probability (probability an arriving job waits).
// Saturated input (a >= n, or n < 1) is defined as 1.
double erlang_c(int n, double a);

// Probability that the average of k stationary waiting times exceeds x,
// given total arrival rate lambda and n servers with mean service b.
//
// Model: single waits follow the M/M/n tail P(W > t) = C exp(-theta t),
// C = erlang_c(n, lambda b), theta = (n/b - lambda). Non-exponential inputs
// scale the mean wait by the two-moment factor (ca^2 + cs^2)/2, keeping the
// exponential tail shape. k = 1 is exact under the model. For k > 1,
// consecutive waits are strongly autocorrelated, so an i.i.d. treatment of
// the k-fold average badly underestimates its variance; instead the variance
// of the window mean is inflated by the standard stationary-process factor
// S(k, tau) = 1 + 2 sum_{j<k} (1 - j/k) exp(-j/tau), with an empirically
// calibrated correlation time tau(n, rho/n) (in units of arrivals), and the
// window mean is approximated by a gamma distribution matching that mean and
// variance.
//
// Conventions: x < 0 -> 1 (residual obligation already blown);
// lambda <= 0 -> 0; n = 0 with lambda > 0, or rho >= n -> 1.
double g(double x, double lambda, int k, int n, double b, double ca2 = 1.0, double cs2 = 1.0);

// Erlang-B blocking of a session loss system: M circuits, offered
// session-load A = delta * k / gamma.
double threshold_blocking(int m, double a);

// Estimated traffic moments the Threshold revenue model needs besides the
// class contract.
struct ClassTraffic {
    double mean_service = 1.0; // b
    double interarrival_scv = 1.0;
    double service_scv = 1.0;
};

// Long-run revenue rate of class `cls` under admission threshold m with n
// servers. Sessions form an Erlang-B loss system with offered session-load
// A = delta * k / gamma; the penalty probability is averaged over the
// admitted occupancy states (an admitted arrival sees j < m active sessions
// with the loss system's stationary weights and contributes job rate
// (j+1) * gamma while it lives).
double threshold_revenue(const ServiceClass& cls, int m, int n, const ClassTraffic& traffic);

struct ThresholdSearch {
    int m_max = 1000;
    double epsilon = 1e-6;
};

// Sentinel returned by find_threshold for classes whose revenue keeps
// growing with M (lightly loaded, or penalty-free).
inline constexpr int kUnboundedThreshold = -1;

// Sequential unimodal search over M = 1, 2, ...: stops at the first decrease
// (returns the peak) or when an increase falls below epsilon (returns the
// best M so far). Penalty-free classes and searches that exhaust m_max while
// still increasing return kUnboundedThreshold.
int find_threshold(const ServiceClass& cls, int n, const ClassTraffic& traffic,
                   const ThresholdSearch& search = {});

} // namespace provsim::queueing
