#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "qfhe/qcore.hpp"

// Bosonic Fock-space backend for the photonic gate architecture.
// Photons live in modes indexed by (rail, polarization, distinguishability
// label). A state is a sparse map from photon multisets (at most four
// photons) to complex amplitudes of the normalized occupation basis states.
// Optical elements are linear transformations of creation operators;
// two-qubit gates arise from two-photon interference plus post-selection.
//
// Polarization encodes the qubit: H = |0>, V = |1>. Beamsplitter convention:
// real orthogonal mixing [[cos,-sin],[sin,cos]] with the reflection phase on
// the second mode, so a PBS maps a_V -> b_V, b_V -> -a_V.

namespace qfhe::optics {

struct PostSelectionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kMaxPhotons = 4;
constexpr int kLabels = 4;

inline std::uint8_t mode_id(int rail, int pol, int label) {
    return static_cast<std::uint8_t>(rail * 8 + pol * 4 + label);
}
inline int mode_rail(std::uint8_t m) { return m / 8; }
inline int mode_pol(std::uint8_t m) { return (m % 8) / 4; }
inline int mode_label(std::uint8_t m) { return m % 4; }

class FockState {
public:
    static FockState vacuum();

    // Applies sum_(pol,label) amps * a^dag_(rail,pol,label) to the state.
    // pol_amps has two entries (H, V); label_amps at most kLabels.
    void create_photon(int rail, const Vec& pol_amps, const Vec& label_amps);

    double norm_sq() const;
    std::size_t term_count() const { return terms_.size(); }
    const std::map<std::uint64_t, Complex>& terms() const { return terms_; }
    Complex amplitude(const std::vector<std::uint8_t>& photon_modes) const;

    // modes[j] is the j-th old mode; u(i, j) the amplitude sending it to
    // modes[i]. u must be unitary.
    void apply_mode_unitary(const std::vector<std::uint8_t>& modes, const Mat& u);

    // Keeps terms with exactly one photon in each rail of `one_photon_rails`
    // and none in `empty_rails`; returns the success probability and leaves
    // the state renormalized (vacuum if the probability vanished).
    double post_select(const std::vector<int>& one_photon_rails,
                       const std::vector<int>& empty_rails);

    // Outcome probabilities and collapsed states for measuring the
    // polarization of the single photon in `rail` (H -> 0, V -> 1).
    std::array<std::pair<double, FockState>, 2> measure_polarization(int rail) const;

    // 2x2 polarization density matrix of the photon in `rail`, tracing out
    // labels and all other photons. Requires exactly one photon in the rail.
    Eigen::Matrix2cd polarization_density(int rail) const;

private:
    std::map<std::uint64_t, Complex> terms_;
};

struct OpticalElement {
    enum class Kind { BS, PPBS, PBS, HWP, QWP, Phase, Attenuator, PolUnitary, LabelMix };
    Kind kind;
    double param = 0.0;       // transmission, angle, phase, or visibility
    int rail_a = -1;
    int rail_b = -1;          // second rail for two-rail elements
    int loss_rail = -1;       // attenuator sink
    int pol = -1;             // attenuator polarization (0=H, 1=V)
    int from_label = 0;       // LabelMix source label
    int to_label = 1;         // LabelMix target label
    Eigen::Matrix2cd jones = Eigen::Matrix2cd::Identity();  // PolUnitary

    static OpticalElement bs(double transmission, int rail_a, int rail_b);
    static OpticalElement ppbs(double t_v, int rail_a, int rail_b);
    static OpticalElement pbs(int rail_a, int rail_b);
    static OpticalElement hwp(double theta, int rail);
    static OpticalElement qwp(double theta, int rail);
    static OpticalElement phase(double phi, int rail);
    static OpticalElement attenuator(double t, int rail, int pol, int loss_rail);
    static OpticalElement pol_unitary(const Eigen::Matrix2cd& u, int rail);
    static OpticalElement label_mix(double visibility, int rail, int from_label, int to_label);
};

FockState apply_element(FockState state, const OpticalElement& e);

// Rotates a fraction of a photon's creation operator into an orthogonal
// internal label: cos = sqrt(visibility) stays aligned. With v = 1 the HOM
// coincidence probability at a 50/50 splitter is 0, with v = 0 it is 1/2.
FockState distinguishability_mix(FockState state, int rail, double visibility,
                                 int from_label = 0, int to_label = 1);

// Coincidence probability of two otherwise identical photons meeting at a
// beamsplitter, as a function of their indistinguishability.
double hom_coincidence_probability(double visibility, double transmission = 0.5);

// Post-selected controlled-Z from a T_V = 1/3 partially polarizing
// beamsplitter with sqrt(1/3) balancing attenuation on H of both rails.
struct PpbsCzResult {
    Eigen::Matrix4cd conditional_map;  // = CZ / 3 for perfect interference
    double success_probability;        // for the supplied input pair
};
PpbsCzResult ppbs_cz(const Vec& qubit_a, const Vec& qubit_b, double visibility = 1.0);

// Phase-summing gate on two equatorial ancillas: PBS, then a halfwave plate
// at 22.5 deg on output b, post-selected on a coincidence. The herald is the
// b-photon polarization with k1 = 0 for V and k1 = 1 for H; each herald
// branch has probability 1/4 for equatorial inputs.
struct PhaseAddBranch {
    int herald_k1;
    double probability;
    Eigen::Vector2cd output;            // photon left in mode a (pure for v = 1)
    Eigen::Matrix2cd output_density;    // exact conditional state, labels traced
};
std::vector<PhaseAddBranch> pbs_phase_add(const Eigen::Vector2cd& anc_a,
                                          const Eigen::Vector2cd& anc_b,
                                          double visibility = 1.0);

struct NoiseParams {
    double visibility_intra = 0.970;   // photons from the same SPDC pair
    double visibility_inter = 0.900;   // photons from different pairs
    double double_pair_rate = 0.0140;  // calibrated; see tools `calibrate`
    double accidental_rate = 0.0063;   // calibrated; see tools `calibrate`

    static NoiseParams paper_defaults() { return NoiseParams{}; }
    static NoiseParams noiseless() { return NoiseParams{1.0, 1.0, 0.0, 0.0}; }
    void validate() const;
};

// Expected spurious coincidence counts per outcome cell, given total
// registered events: both components spread uniformly over the cells, each
// proportional to its configured rate (multipliers let callers scale for the
// coincidence order of a specific configuration).
std::vector<double> background_model(const std::vector<double>& raw_counts,
                                     const NoiseParams& noise,
                                     double double_pair_multiplier = 1.0,
                                     double accidental_multiplier = 1.0);
std::vector<double> background_subtract(const std::vector<double>& raw_counts,
                                        const std::vector<double>& expected_background);

}  // namespace qfhe::optics
