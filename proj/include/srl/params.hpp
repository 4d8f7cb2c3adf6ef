#pragma once

namespace srl {

// Driven atom-cavity parameters.  Every rate is in units of the effective
// spontaneous decay rate gamma; delta = omega_c - omega_a.
struct SystemParams {
    int n_atoms = 2;
    double g = 40.0;        // atom-cavity coupling
    double kappa = 1.0e6;   // cavity loss
    double w = 0.1;         // incoherent repump
    double delta = 0.0;     // cavity-atom detuning

    // Throws std::invalid_argument on negative rates or n_atoms < 1.
    void validate() const;

    // True in the regime the defaults target (kappa >> g).
    bool bad_cavity() const { return kappa > 10.0 * g; }
};

}  // namespace srl
