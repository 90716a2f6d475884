#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "qfhe/evaluator.hpp"
#include "qfhe/qcore.hpp"

// Single-qubit process tomography of an evaluation pipeline: counts,
// linear-inversion chi reconstruction with physical projection (optional
// iterative MLE refinement), fidelities, and Bloch-sphere image export.

namespace qfhe::tomo {

enum class PauliAxis { X = 0, Y = 1, Z = 2 };

struct TomoPlan {
    std::vector<PureState> preparations;
    std::vector<PauliAxis> bases;
    int shots_per_setting = 10000;

    // Six Pauli eigenstate preparations, three measurement bases.
    static TomoPlan standard(int shots);
    void validate() const;
};

// One full protocol run: prepare the given plaintext, push it through the
// channel under test, measure the named Pauli axis; returns the outcome bit.
using Pipeline = std::function<int(const PureState& prep, PauliAxis basis, RandomStream& rng)>;

struct TomoCounts {
    TomoPlan plan;
    // counts[prep][basis] = {n_outcome0, n_outcome1}; doubles so corrected
    // (background-subtracted) tables fit the same shape
    std::vector<std::vector<std::array<double, 2>>> counts;
};

TomoCounts run_tomography(const Pipeline& pipeline, const TomoPlan& plan, RandomStream& rng,
                          int threads = 1);

// Adds uniformly distributed spurious events: each setting gains
// Binomial(shots, fraction) extra counts split over the outcomes.
void inject_background(TomoCounts& counts, double fraction, RandomStream& rng);
// Removes the modeled expectation, clamping at zero.
void subtract_background(TomoCounts& counts, double fraction);

struct ProcessMatrix {
    Eigen::Matrix4cd chi;  // Pauli basis {I, X, Y, Z}; Hermitian, PSD, trace 1
};

struct ReconstructOptions {
    bool mle_refine = false;
    int mle_iterations = 150;
};

// Linear inversion of the Pauli transfer map followed by projection onto the
// physical (PSD, trace-one) set; optionally refined by projected-gradient
// maximum likelihood.
ProcessMatrix reconstruct(const TomoCounts& counts, const ReconstructOptions& opts = {});

ProcessMatrix chi_of_unitary(const Mat& u);
ProcessMatrix chi_depolarizing();

// Entanglement fidelity Tr(chi_target chi_est) for a unitary target, mapped
// to the average gate fidelity (d F_e + 1) / (d + 1), d = 2.
double average_fidelity(const ProcessMatrix& est, const Gate& target);
// Uhlmann fidelity between two normalized chi matrices; reduces to the
// entanglement fidelity when one argument is a unitary's rank-one chi.
double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b);

// Affine Bloch action (r -> M r + t) of the channel.
void bloch_action(const ProcessMatrix& chi, Eigen::Matrix3d& m, Eigen::Vector3d& t);

struct BlochMapExport {
    struct Row {
        Eigen::Vector3d input;
        Eigen::Vector3d output;
        int color_id;
    };
    std::vector<Row> rows;
};
BlochMapExport bloch_export(const ProcessMatrix& chi, int n_polar = 13, int n_azimuth = 24);

// ---- ready-made pipelines ----

// Ideal unitary applied directly (no encryption); reference and test oracle.
Pipeline ideal_pipeline(const Gate& u);
// Fully depolarizing channel.
Pipeline depolarizing_pipeline();
// Full scheme on the exact qubit backend: prepare, evaluate, decrypt with
// the matching or an unrelated FHE key pair, then measure.
Pipeline qfhe_qubit_pipeline(const CircuitDescription& circuit, const FheParams& fhe_params,
                             bool wrong_key, std::uint64_t key_seed);

// Photonic backend pipeline with exact branch caching per (preparation,
// pad) configuration; post-selection failures resample fresh pads and are
// tallied in `discarded`.
class OpticsPipeline {
public:
    OpticsPipeline(const CircuitDescription& circuit, const optics::NoiseParams& noise,
                   const FheParams& fhe_params, bool wrong_key, std::uint64_t key_seed);
    int operator()(const PureState& prep, PauliAxis basis, RandomStream& rng) const;
    std::uint64_t discarded() const { return discarded_->load(); }

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    std::shared_ptr<std::atomic<std::uint64_t>> discarded_;
};

}  // namespace qfhe::tomo
