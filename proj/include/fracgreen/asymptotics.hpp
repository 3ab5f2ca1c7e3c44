#pragma once

namespace fracgreen {

// J(Omega) = int_0^1 w^N exp(-w Omega - c w^-a) dw
struct LaplaceIntegrandSpec {
    double N = 0.0;
    double a = 1.0;
    double c = 1.0;
    double Omega = 1.0;
    void validate() const;
};

// Endpoint minimum of h at b: g(b) (lambda h'(b))^-1 exp(-lambda h(b))
double laplace_boundary(double g_at_b, double h_at_b, double h_prime_at_b, double lambda);
double log_laplace_boundary(double g_at_b, double h_at_b, double h_prime_at_b, double lambda);
// Interior minimum: g sqrt(2 pi / (lambda h'')) exp(-lambda h)
double laplace_interior(double g_at_bt, double h_at_bt, double h_second_at_bt, double lambda);
double log_laplace_interior(double g_at_bt, double h_at_bt, double h_second_at_bt, double lambda);

struct LaplaceConstants {
    double C1 = 0.0;
    double C2 = 0.0;
    double omega_power = 0.0;  // exponent of Omega in the prefactor
    double decay_power = 0.0;  // a / (a + 1)
};
LaplaceConstants laplace_constants(double N, double a, double c);

// Leading-order log J(Omega).
double prop_a1_asymptotic(const LaplaceIntegrandSpec& s);
// Quadrature of log J(Omega); AccuracyError if it does not converge.
double oracle_J(const LaplaceIntegrandSpec& s);

}  // namespace fracgreen
