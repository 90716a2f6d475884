#include "qfhe/qcore.hpp"

#include <array>
#include <cmath>

namespace qfhe {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

Mat mat2(Complex a, Complex b, Complex c, Complex d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

void check_power_of_two(Eigen::Index n) {
    if (n < 2 || (n & (n - 1)) != 0)
        throw DimensionError("state dimension must be a power of two, got " + std::to_string(n));
}

int log2_dim(Eigen::Index n) {
    int k = 0;
    while ((Eigen::Index{1} << k) < n) ++k;
    return k;
}

}  // namespace

PureState PureState::computational(int num_qubits, int basis_index) {
    if (num_qubits < 1 || num_qubits > kMaxQubits)
        throw DimensionError("register size out of range: " + std::to_string(num_qubits));
    Vec v = Vec::Zero(Eigen::Index{1} << num_qubits);
    v(basis_index) = 1.0;
    return PureState(num_qubits, std::move(v));
}

PureState PureState::from_amplitudes(Vec amplitudes) {
    check_power_of_two(amplitudes.size());
    const int n = log2_dim(amplitudes.size());
    if (n > kMaxQubits)
        throw DimensionError("register size out of range: " + std::to_string(n));
    const double norm = amplitudes.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        if (norm < 1e-12) throw DimensionError("zero-norm amplitude vector");
        amplitudes /= norm;
    }
    return PureState(n, std::move(amplitudes));
}

PureState PureState::haar_random(int num_qubits, RandomStream& rng) {
    Vec v(Eigen::Index{1} << num_qubits);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = Complex(rng.gaussian(), rng.gaussian());
    v /= v.norm();
    return PureState(num_qubits, std::move(v));
}

PureState PureState::tensor(const PureState& other) const {
    const Eigen::Index d1 = dim(), d2 = other.dim();
    if (num_qubits_ + other.num_qubits_ > kMaxQubits)
        throw DimensionError("tensor product exceeds max register size");
    Vec v(d1 * d2);
    for (Eigen::Index i = 0; i < d1; ++i)
        for (Eigen::Index j = 0; j < d2; ++j)
            v(i * d2 + j) = amps_(i) * other.amps_(j);
    return PureState(num_qubits_ + other.num_qubits_, std::move(v));
}

Complex PureState::inner(const PureState& other) const {
    if (dim() != other.dim()) throw DimensionError("inner product dimension mismatch");
    return amps_.dot(other.amps_);
}

double PureState::fidelity(const PureState& other) const {
    return std::norm(inner(other));
}

bool PureState::equals_up_to_phase(const PureState& other, double tol) const {
    return std::abs(std::abs(inner(other)) - 1.0) < tol;
}

DensityMatrix PureState::projector() const {
    return DensityMatrix::from_pure(*this);
}

DensityMatrix DensityMatrix::from_matrix(Mat m) {
    if (m.rows() != m.cols()) throw DimensionError("density matrix must be square");
    check_power_of_two(m.rows());
    const int n = log2_dim(m.rows());
    if ((m - m.adjoint()).norm() > 1e-12)
        throw DimensionError("density matrix not Hermitian");
    if (std::abs(m.trace().real() - 1.0) > 1e-12 || std::abs(m.trace().imag()) > 1e-12)
        throw DimensionError("density matrix trace != 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw DimensionError("density matrix has negative eigenvalue");
    return DensityMatrix(n, std::move(m));
}

DensityMatrix DensityMatrix::from_pure(const PureState& s) {
    Mat m = s.amplitudes() * s.amplitudes().adjoint();
    return DensityMatrix(s.num_qubits(), std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    return DensityMatrix(num_qubits, Mat::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::fidelity_to_pure(const PureState& s) const {
    if (dim() != s.dim()) throw DimensionError("fidelity dimension mismatch");
    return (s.amplitudes().adjoint() * m_ * s.amplitudes())(0).real();
}

Eigen::Vector3d DensityMatrix::bloch_vector() const {
    if (num_qubits_ != 1) throw DimensionError("bloch_vector requires a single qubit");
    Eigen::Vector3d r;
    for (int k = 1; k <= 3; ++k) r(k - 1) = (pauli(k) * m_).trace().real();
    return r;
}

std::string gate_name(GateKind k) {
    switch (k) {
        case GateKind::I: return "I";
        case GateKind::X: return "X";
        case GateKind::Y: return "Y";
        case GateKind::Z: return "Z";
        case GateKind::H: return "H";
        case GateKind::P: return "P";
        case GateKind::Pdag: return "Pdag";
        case GateKind::T: return "T";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::Custom: return "custom";
    }
    return "?";
}

Gate Gate::make(GateKind k) {
    const Complex i(0, 1);
    switch (k) {
        case GateKind::I: return Gate(k, Mat::Identity(2, 2), "I");
        case GateKind::X: return Gate(k, mat2(0, 1, 1, 0), "X");
        case GateKind::Y: return Gate(k, mat2(0, -i, i, 0), "Y");
        case GateKind::Z: return Gate(k, mat2(1, 0, 0, -1), "Z");
        case GateKind::H: return Gate(k, mat2(kSqrtHalf, kSqrtHalf, kSqrtHalf, -kSqrtHalf), "H");
        case GateKind::P: return Gate(k, mat2(1, 0, 0, i), "P");
        case GateKind::Pdag: return Gate(k, mat2(1, 0, 0, -i), "Pdag");
        case GateKind::T: return Gate(k, mat2(1, 0, 0, std::polar(1.0, M_PI / 4)), "T");
        case GateKind::CNOT: {
            Mat m = Mat::Zero(4, 4);
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
            return Gate(k, std::move(m), "CNOT");
        }
        case GateKind::CZ: {
            Mat m = Mat::Identity(4, 4);
            m(3, 3) = -1;
            return Gate(k, std::move(m), "CZ");
        }
        case GateKind::Custom:
            throw UnsupportedGateError("use Gate::custom for custom gates");
    }
    throw UnsupportedGateError("unknown gate kind");
}

Gate Gate::custom(Mat u, std::string name) {
    if (u.rows() != u.cols()) throw DimensionError("gate matrix must be square");
    if ((u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).norm() > 1e-12)
        throw DimensionError("gate matrix not unitary");
    return Gate(GateKind::Custom, std::move(u), std::move(name));
}

int Gate::arity() const { return log2_dim(u_.rows()); }

const Mat& pauli(int k) {
    static const std::array<Mat, 4> sigmas = [] {
        const Complex i(0, 1);
        return std::array<Mat, 4>{Mat::Identity(2, 2), mat2(0, 1, 1, 0),
                                  mat2(0, -i, i, 0), mat2(1, 0, 0, -1)};
    }();
    return sigmas.at(static_cast<std::size_t>(k));
}

Mat pad_operator(int a, int b) {
    Mat m = Mat::Identity(2, 2);
    if (b) m = pauli(1) * m;
    if (a) m = pauli(3) * m;
    return m;
}

const std::vector<PureState>& pauli_eigenstates() {
    static const std::vector<PureState> states = [] {
        const Complex i(0, 1);
        std::vector<PureState> out;
        Vec v(2);
        v << 1, 0;
        out.push_back(PureState::from_amplitudes(v));
        v << 0, 1;
        out.push_back(PureState::from_amplitudes(v));
        v << kSqrtHalf, kSqrtHalf;
        out.push_back(PureState::from_amplitudes(v));
        v << kSqrtHalf, -kSqrtHalf;
        out.push_back(PureState::from_amplitudes(v));
        v << kSqrtHalf, i * kSqrtHalf;
        out.push_back(PureState::from_amplitudes(v));
        v << kSqrtHalf, -i * kSqrtHalf;
        out.push_back(PureState::from_amplitudes(v));
        return out;
    }();
    return states;
}

PureState state_from_bloch(double theta, double phi) {
    Vec v(2);
    v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
    return PureState::from_amplitudes(v);
}

Mat embed(const Mat& u, const std::vector<int>& targets, int num_qubits) {
    const int k = log2_dim(u.rows());
    if (static_cast<int>(targets.size()) != k)
        throw DimensionError("target count does not match gate arity");
    for (int t : targets)
        if (t < 0 || t >= num_qubits) throw DimensionError("gate target out of register");
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    Mat full = Mat::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        int sub_col = 0;
        for (int j = 0; j < k; ++j)
            sub_col = (sub_col << 1) | qubit_bit(static_cast<int>(col), targets[j], num_qubits);
        for (int sub_row = 0; sub_row < (1 << k); ++sub_row) {
            const Complex amp = u(sub_row, sub_col);
            if (amp == Complex(0, 0)) continue;
            Eigen::Index row = col;
            for (int j = 0; j < k; ++j) {
                const int bit = (sub_row >> (k - 1 - j)) & 1;
                const Eigen::Index mask = Eigen::Index{1} << (num_qubits - 1 - targets[j]);
                row = bit ? (row | mask) : (row & ~mask);
            }
            full(row, col) += amp;
        }
    }
    return full;
}

PureState apply_gate(const PureState& state, const Gate& g, const std::vector<int>& targets) {
    Mat full = embed(g.matrix(), targets, state.num_qubits());
    return PureState::from_amplitudes(full * state.amplitudes());
}

DensityMatrix apply_gate(const DensityMatrix& state, const Gate& g, const std::vector<int>& targets) {
    Mat full = embed(g.matrix(), targets, state.num_qubits());
    return DensityMatrix::from_matrix(full * state.matrix() * full.adjoint());
}

std::optional<MeasurementResult> measurement_branch(const PureState& state, int qubit, int outcome) {
    const int n = state.num_qubits();
    if (qubit < 0 || qubit >= n) throw DimensionError("measured qubit out of register");
    const Eigen::Index dim = state.dim();
    const Eigen::Index sub_dim = dim / 2;
    Vec sub(sub_dim);
    Eigen::Index w = 0;
    double p = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (qubit_bit(static_cast<int>(i), qubit, n) != outcome) continue;
        sub(w++) = state.amplitudes()(i);
        p += std::norm(state.amplitudes()(i));
    }
    if (p < 1e-14) return std::nullopt;
    sub /= std::sqrt(p);
    if (n == 1) {
        // collapsing the last qubit leaves a trivial register; keep dimension 2
        Vec v = Vec::Zero(2);
        v(outcome) = 1.0;
        return MeasurementResult{outcome, PureState::from_amplitudes(v), p};
    }
    return MeasurementResult{outcome, PureState::from_amplitudes(sub), p};
}

MeasurementResult measure_computational(const PureState& state, int qubit, RandomStream& rng) {
    auto b0 = measurement_branch(state, qubit, 0);
    const double p0 = b0 ? b0->probability : 0.0;
    if (rng.uniform() < p0) return *b0;
    auto b1 = measurement_branch(state, qubit, 1);
    if (!b1) return *b0;  // p0 == 1 numerically
    return *b1;
}

double pauli_outcome_prob_one(const DensityMatrix& rho, int axis) {
    const double expectation = (pauli(axis + 1) * rho.matrix()).trace().real();
    return 0.5 * (1.0 - expectation);
}

namespace {

Mat pauli_word_matrix(const PauliWord& w) {
    Mat m = pad_operator(w.z[0], w.x[0]);
    for (std::size_t i = 1; i < w.z.size(); ++i) {
        const Mat factor = pad_operator(w.z[i], w.x[i]);
        Mat out(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                out.block(r * 2, c * 2, 2, 2) = m(r, c) * factor;
        m = std::move(out);
    }
    return m;
}

}  // namespace

ConjugationResult conjugate_pauli(const Gate& g, const PauliWord& word) {
    const int k = g.arity();
    if (static_cast<int>(word.z.size()) != k || static_cast<int>(word.x.size()) != k)
        throw DimensionError("pauli word length does not match gate arity");
    const bool is_t = g.kind() == GateKind::T;
    switch (g.kind()) {
        case GateKind::I:
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z:
        case GateKind::H:
        case GateKind::P:
        case GateKind::Pdag:
        case GateKind::CNOT:
        case GateKind::CZ:
        case GateKind::T:
            break;
        default:
            throw UnsupportedGateError("conjugate_pauli supports Clifford gates and T only");
    }
    const Mat lhs = g.matrix() * pauli_word_matrix(word);
    const Eigen::Index dim = lhs.rows();

    std::vector<Gate> residuals;
    residuals.push_back(Gate::make(GateKind::I));
    if (is_t) residuals.push_back(Gate::make(GateKind::P));

    for (int code = 0; code < (1 << (2 * k)); ++code) {
        PauliWord cand;
        cand.z.resize(k);
        cand.x.resize(k);
        for (int j = 0; j < k; ++j) {
            cand.z[j] = (code >> (2 * j)) & 1;
            cand.x[j] = (code >> (2 * j + 1)) & 1;
        }
        const Mat cand_pauli = pauli_word_matrix(cand);
        for (const Gate& res : residuals) {
            Mat res_full = res.matrix();
            if (k == 2) res_full = embed(res.matrix(), {0}, 2);
            const Mat rhs = cand_pauli * res_full * g.matrix();
            const Complex phase = (rhs.adjoint() * lhs).trace() / static_cast<double>(dim);
            if (std::abs(std::abs(phase) - 1.0) > 1e-9) continue;
            if ((lhs - phase * rhs).norm() < 1e-12)
                return ConjugationResult{cand, res, phase};
        }
    }
    throw UnsupportedGateError("no Pauli-word conjugation found for gate " + g.name());
}

Channel Channel::from_unitary(const Mat& u) {
    Channel ch;
    ch.kraus.push_back(u);
    ch.validate();
    return ch;
}

Channel Channel::depolarizing(double p) {
    Channel ch;
    ch.kraus.push_back(std::sqrt(1.0 - 3.0 * p / 4.0) * pauli(0));
    for (int k = 1; k <= 3; ++k) ch.kraus.push_back(std::sqrt(p / 4.0) * pauli(k));
    ch.validate();
    return ch;
}

DensityMatrix Channel::apply(const DensityMatrix& rho) const {
    Mat out = Mat::Zero(rho.dim(), rho.dim());
    for (const Mat& k : kraus) out += k * rho.matrix() * k.adjoint();
    if (!trace_preserving) out /= out.trace().real();
    return DensityMatrix::from_matrix(std::move(out));
}

void Channel::validate() const {
    if (kraus.empty()) throw DimensionError("channel has no Kraus operators");
    const Eigen::Index d = kraus.front().rows();
    Mat sum = Mat::Zero(d, d);
    for (const Mat& k : kraus) {
        if (k.rows() != d || k.cols() != d) throw DimensionError("Kraus operator shape mismatch");
        sum += k.adjoint() * k;
    }
    if (trace_preserving) {
        if ((sum - Mat::Identity(d, d)).norm() > 1e-10)
            throw DimensionError("Kraus operators do not sum to identity");
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(Mat::Identity(d, d) - sum);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw DimensionError("post-selected channel exceeds identity");
    }
}

Eigen::Matrix4cd channel_chi(const Channel& ch) {
    if (ch.kraus.front().rows() != 2)
        throw UnsupportedGateError("channel_chi supports single-qubit channels only");
    Eigen::Matrix4cd chi = Eigen::Matrix4cd::Zero();
    for (const Mat& k : ch.kraus) {
        Eigen::Vector4cd c;
        for (int m = 0; m < 4; ++m) c(m) = (pauli(m).adjoint() * k).trace() / 2.0;
        chi += c * c.adjoint();
    }
    return chi;
}

Channel kraus_from_chi(const Eigen::Matrix4cd& chi) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(chi);
    Channel ch;
    ch.trace_preserving = std::abs(chi.trace().real() - 1.0) < 1e-8;
    for (int j = 0; j < 4; ++j) {
        const double lambda = es.eigenvalues()(j);
        if (lambda < 1e-14) continue;
        Mat k = Mat::Zero(2, 2);
        for (int m = 0; m < 4; ++m) k += std::sqrt(lambda) * es.eigenvectors()(m, j) * pauli(m);
        ch.kraus.push_back(std::move(k));
    }
    return ch;
}

}  // namespace qfhe
