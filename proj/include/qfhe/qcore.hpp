#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfhe/random.hpp"

// Exact dense simulation of small qubit registers (n <= 4). Qubit ordering
// convention, used everywhere in this codebase: qubit 0 is the *leftmost*
// tensor factor, so the bit of qubit q in basis index i is
// (i >> (n-1-q)) & 1.

namespace qfhe {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct UnsupportedGateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

constexpr int kMaxQubits = 4;
constexpr double kStateTol = 1e-10;

inline int qubit_bit(int index, int qubit, int num_qubits) {
    return (index >> (num_qubits - 1 - qubit)) & 1;
}

class DensityMatrix;

class PureState {
public:
    static PureState computational(int num_qubits, int basis_index);
    static PureState zero(int num_qubits) { return computational(num_qubits, 0); }
    static PureState from_amplitudes(Vec amplitudes);
    static PureState haar_random(int num_qubits, RandomStream& rng);

    int num_qubits() const { return num_qubits_; }
    Eigen::Index dim() const { return amps_.size(); }
    const Vec& amplitudes() const { return amps_; }
    Complex amplitude(int basis_index) const { return amps_(basis_index); }

    PureState tensor(const PureState& other) const;
    Complex inner(const PureState& other) const;
    // |<u|v>|^2
    double fidelity(const PureState& other) const;
    bool equals_up_to_phase(const PureState& other, double tol = kStateTol) const;
    DensityMatrix projector() const;

private:
    PureState(int num_qubits, Vec amps) : num_qubits_(num_qubits), amps_(std::move(amps)) {}
    int num_qubits_;
    Vec amps_;
};

class DensityMatrix {
public:
    static DensityMatrix from_matrix(Mat m);
    static DensityMatrix from_pure(const PureState& s);
    static DensityMatrix maximally_mixed(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    Eigen::Index dim() const { return m_.rows(); }
    const Mat& matrix() const { return m_; }

    double fidelity_to_pure(const PureState& s) const;
    Eigen::Vector3d bloch_vector() const;  // single-qubit only

private:
    DensityMatrix(int num_qubits, Mat m) : num_qubits_(num_qubits), m_(std::move(m)) {}
    int num_qubits_;
    Mat m_;
};

enum class GateKind { I, X, Y, Z, H, P, Pdag, T, CNOT, CZ, Custom };

std::string gate_name(GateKind k);

class Gate {
public:
    static Gate make(GateKind k);
    static Gate custom(Mat u, std::string name = "custom");

    GateKind kind() const { return kind_; }
    const Mat& matrix() const { return u_; }
    int arity() const;
    const std::string& name() const { return name_; }

private:
    Gate(GateKind k, Mat u, std::string name)
        : kind_(k), u_(std::move(u)), name_(std::move(name)) {}
    GateKind kind_;
    Mat u_;
    std::string name_;
};

// Pauli matrices sigma_0..sigma_3 = I, X, Y, Z.
const Mat& pauli(int k);
// Z^a X^b as a single-qubit operator.
Mat pad_operator(int a, int b);
// The six Pauli eigenstates |0>,|1>,|+>,|->,|+i>,|-i>.
const std::vector<PureState>& pauli_eigenstates();
PureState state_from_bloch(double theta, double phi);

// Embed a k-qubit gate matrix acting on `targets` into the full register.
Mat embed(const Mat& u, const std::vector<int>& targets, int num_qubits);

PureState apply_gate(const PureState& state, const Gate& g, const std::vector<int>& targets);
DensityMatrix apply_gate(const DensityMatrix& state, const Gate& g, const std::vector<int>& targets);

struct MeasurementResult {
    int outcome;
    PureState collapsed;     // measured qubit removed from the register
    double probability;
};

// Computational-basis measurement of one qubit; outcome sampled by Born rule.
MeasurementResult measure_computational(const PureState& state, int qubit, RandomStream& rng);
// Deterministic branch: nullopt when the branch has zero norm.
std::optional<MeasurementResult> measurement_branch(const PureState& state, int qubit, int outcome);
// Born probability of outcome 1 when measuring sigma_axis (0=X,1=Y,2=Z).
double pauli_outcome_prob_one(const DensityMatrix& rho, int axis);

// Pauli word on the qubits a gate acts on: per-qubit (z_exponent, x_exponent).
struct PauliWord {
    std::vector<int> z;
    std::vector<int> x;
    bool operator==(const PauliWord&) const = default;
};

struct ConjugationResult {
    PauliWord word;
    Gate residual;     // identity for Cliffords; I or P for T
    Complex phase;
};

// Solve  g * Z^a X^b = phase * Z^a' X^b' * residual * g  by exact matrix
// search. Supports the Clifford set {I,X,Y,Z,H,P,Pdag,CNOT,CZ} and T.
ConjugationResult conjugate_pauli(const Gate& g, const PauliWord& word);

struct Channel {
    std::vector<Mat> kraus;
    bool trace_preserving = true;  // false marks a post-selected (sub-normalized) map

    static Channel from_unitary(const Mat& u);
    static Channel depolarizing(double p = 1.0);
    DensityMatrix apply(const DensityMatrix& rho) const;
    void validate() const;
};

// chi matrix of a single-qubit channel in the Pauli basis:
// K_j = sum_k c_jk sigma_k, chi = sum_j c_j c_j^dagger.
Eigen::Matrix4cd channel_chi(const Channel& ch);
// Kraus decomposition back out of a chi matrix.
Channel kraus_from_chi(const Eigen::Matrix4cd& chi);

}  // namespace qfhe
