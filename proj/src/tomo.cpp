#include "qfhe/tomo.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>

namespace qfhe::tomo {

namespace {

Mat basis_rotation(PauliAxis axis) {
    // U with U sigma_axis U^dag = Z, so measuring Z after U measures the axis
    const Complex i(0, 1);
    Mat u(2, 2);
    switch (axis) {
        case PauliAxis::X:
            u << 1, 1, 1, -1;
            u /= std::sqrt(2.0);
            return u;
        case PauliAxis::Y:
            u << 1, -i, 1, i;
            u /= std::sqrt(2.0);
            return u;
        case PauliAxis::Z:
            return Mat::Identity(2, 2);
    }
    throw DimensionError("unknown axis");
}

int sample_bit(double p_one, RandomStream& rng) { return rng.uniform() < p_one ? 1 : 0; }

double prob_one_in_basis(const Eigen::Matrix2cd& rho, PauliAxis axis) {
    const Mat u = basis_rotation(axis);
    const Eigen::Matrix2cd rotated = u * rho * u.adjoint();
    return rotated(1, 1).real();
}

}  // namespace

TomoPlan TomoPlan::standard(int shots) {
    TomoPlan plan;
    plan.preparations = pauli_eigenstates();
    plan.bases = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
    plan.shots_per_setting = shots;
    return plan;
}

void TomoPlan::validate() const {
    if (preparations.empty() || bases.empty() || shots_per_setting < 1)
        throw DimensionError("empty tomography plan");
    for (const PureState& s : preparations)
        if (s.num_qubits() != 1) throw DimensionError("tomography preparations must be qubits");
    // informational completeness: projectors must span the operator space
    Eigen::MatrixXd design(static_cast<Eigen::Index>(preparations.size()), 4);
    for (std::size_t i = 0; i < preparations.size(); ++i) {
        const Eigen::Vector3d r = preparations[i].projector().bloch_vector();
        design(static_cast<Eigen::Index>(i), 0) = 1.0;
        design.block<1, 3>(static_cast<Eigen::Index>(i), 1) = r.transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 4)
        throw DimensionError("preparations are not informationally complete (need >= 4 "
                             "linearly independent states)");
}

TomoCounts run_tomography(const Pipeline& pipeline, const TomoPlan& plan, RandomStream& rng,
                          int threads) {
    plan.validate();
    TomoCounts out;
    out.plan = plan;
    out.counts.assign(plan.preparations.size(),
                      std::vector<std::array<double, 2>>(plan.bases.size(), {0.0, 0.0}));
    const int shots = plan.shots_per_setting;
    threads = std::max(1, threads);

    for (std::size_t pi = 0; pi < plan.preparations.size(); ++pi) {
        for (std::size_t bi = 0; bi < plan.bases.size(); ++bi) {
            const std::uint64_t setting = pi * 131 + bi;
            const RandomStream setting_stream = rng.derive(setting);
            std::vector<std::array<double, 2>> partial(static_cast<std::size_t>(threads),
                                                       {0.0, 0.0});
            auto worker = [&](int t) {
                const int lo = static_cast<int>((static_cast<long>(shots) * t) / threads);
                const int hi = static_cast<int>((static_cast<long>(shots) * (t + 1)) / threads);
                for (int s = lo; s < hi; ++s) {
                    RandomStream shot_stream =
                        setting_stream.derive(static_cast<std::uint64_t>(s));
                    const int bit = pipeline(plan.preparations[pi], plan.bases[bi], shot_stream);
                    partial[static_cast<std::size_t>(t)][static_cast<std::size_t>(bit & 1)] += 1;
                }
            };
            if (threads == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
                for (auto& th : pool) th.join();
            }
            for (const auto& p : partial) {
                out.counts[pi][bi][0] += p[0];
                out.counts[pi][bi][1] += p[1];
            }
        }
    }
    return out;
}

void inject_background(TomoCounts& counts, double fraction, RandomStream& rng) {
    if (fraction < 0) throw DimensionError("background fraction must be nonnegative");
    if (fraction == 0) return;
    for (auto& row : counts.counts)
        for (auto& cell : row) {
            const double shots = cell[0] + cell[1];
            long extra = 0;
            for (long s = 0; s < static_cast<long>(shots); ++s)
                if (rng.uniform() < fraction) ++extra;
            for (long e = 0; e < extra; ++e) cell[static_cast<std::size_t>(rng.bit())] += 1;
        }
}

void subtract_background(TomoCounts& counts, double fraction) {
    if (fraction < 0) throw DimensionError("background fraction must be nonnegative");
    for (auto& row : counts.counts)
        for (auto& cell : row) {
            const double total = cell[0] + cell[1];
            const double expected_per_outcome = total * fraction / (1.0 + fraction) / 2.0;
            cell[0] = std::max(0.0, cell[0] - expected_per_outcome);
            cell[1] = std::max(0.0, cell[1] - expected_per_outcome);
        }
}

namespace {

Eigen::Vector4cd pauli_vec(const Mat& m) {
    Eigen::Vector4cd v;
    for (int k = 0; k < 4; ++k) v(k) = (pauli(k).adjoint() * m).trace() / 2.0;
    return v;
}

Mat vec_of(const Mat& m) {
    Mat v(4, 1);
    // column stacking
    v(0, 0) = m(0, 0);
    v(1, 0) = m(1, 0);
    v(2, 0) = m(0, 1);
    v(3, 0) = m(1, 1);
    return v;
}

Eigen::Matrix4cd chi_from_ptm(const Eigen::Matrix4d& r) {
    Mat s = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            s += 0.5 * r(i, j) * vec_of(pauli(i)) * vec_of(pauli(j)).adjoint();
    Eigen::Matrix4cd chi;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            Mat basis(4, 4);
            // sigma_n^* (x) sigma_m acting on column-stacked vectors
            const Mat sn = pauli(n).conjugate();
            const Mat sm = pauli(m);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    basis.block(a * 2, b * 2, 2, 2) = sn(a, b) * sm;
            chi(m, n) = (basis.adjoint() * s).trace() / 4.0;
        }
    return chi;
}

Eigen::Matrix4d ptm_from_chi(const Eigen::Matrix4cd& chi) {
    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Complex sum = 0;
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n)
                    sum += chi(m, n) * (pauli(i) * pauli(m) * pauli(j) * pauli(n)).trace();
            r(i, j) = 0.5 * sum.real();
        }
    return r;
}

Eigen::Matrix4cd project_physical(Eigen::Matrix4cd chi) {
    chi = ((chi + chi.adjoint()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(chi);
    Eigen::Vector4d vals = es.eigenvalues();
    for (int k = 0; k < 4; ++k) vals(k) = std::max(0.0, vals(k));
    const double tr = vals.sum();
    if (tr <= 0) return Eigen::Matrix4cd::Identity() / 4.0;
    vals /= tr;
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

double log_likelihood(const Eigen::Matrix4cd& chi,
                      const std::vector<std::pair<Eigen::Matrix4cd, std::array<double, 2>>>& cells) {
    double ll = 0;
    for (const auto& [c, counts] : cells) {
        double p = std::real((chi.array() * c.array()).sum());
        p = std::min(1.0 - 1e-12, std::max(1e-12, p));
        ll += counts[0] * std::log(p) + counts[1] * std::log1p(-p);
    }
    return ll;
}

}  // namespace

ProcessMatrix reconstruct(const TomoCounts& counts, const ReconstructOptions& opts) {
    const auto& plan = counts.plan;
    plan.validate();
    const std::size_t n_prep = plan.preparations.size();
    const std::size_t n_basis = plan.bases.size();

    // least squares for the affine Bloch action, one row per basis
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n_prep), 4);
    for (std::size_t i = 0; i < n_prep; ++i) {
        design(static_cast<Eigen::Index>(i), 0) = 1.0;
        design.block<1, 3>(static_cast<Eigen::Index>(i), 1) =
            plan.preparations[i].projector().bloch_vector().transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 4)
        throw DimensionError("rank-deficient tomography design matrix; add preparations");

    Eigen::Matrix4d ptm = Eigen::Matrix4d::Zero();
    ptm(0, 0) = 1.0;
    for (std::size_t bi = 0; bi < n_basis; ++bi) {
        Eigen::VectorXd e(static_cast<Eigen::Index>(n_prep));
        for (std::size_t pi = 0; pi < n_prep; ++pi) {
            const auto& cell = counts.counts[pi][bi];
            const double total = cell[0] + cell[1];
            if (total <= 0) throw DimensionError("empty counts cell");
            e(static_cast<Eigen::Index>(pi)) = (cell[0] - cell[1]) / total;
        }
        const Eigen::Vector4d sol = qr.solve(e);
        const int row = static_cast<int>(plan.bases[bi]) + 1;
        ptm(row, 0) = sol(0);
        ptm.block<1, 3>(row, 1) = sol.tail<3>().transpose();
    }

    Eigen::Matrix4cd chi = project_physical(chi_from_ptm(ptm));

    if (opts.mle_refine) {
        // projected gradient ascent on the binomial log-likelihood
        std::vector<std::pair<Eigen::Matrix4cd, std::array<double, 2>>> cells;
        double shots_scale = 0;
        for (std::size_t pi = 0; pi < n_prep; ++pi)
            for (std::size_t bi = 0; bi < n_basis; ++bi) {
                const Mat rho = plan.preparations[pi].projector().matrix();
                const Mat u = basis_rotation(plan.bases[bi]);
                const Mat proj0 = u.adjoint() * (Mat(2, 2) << 1, 0, 0, 0).finished() * u;
                Eigen::Matrix4cd c;
                for (int m = 0; m < 4; ++m)
                    for (int n = 0; n < 4; ++n)
                        c(m, n) = (pauli(m) * rho * pauli(n) * proj0).trace();
                cells.emplace_back(c, counts.counts[pi][bi]);
                shots_scale += counts.counts[pi][bi][0] + counts.counts[pi][bi][1];
            }
        double step = 1.0 / std::max(1.0, shots_scale);
        double ll = log_likelihood(chi, cells);
        for (int it = 0; it < opts.mle_iterations; ++it) {
            Eigen::Matrix4cd grad = Eigen::Matrix4cd::Zero();
            for (const auto& [c, cnt] : cells) {
                double p = std::real((chi.array() * c.array()).sum());
                p = std::min(1.0 - 1e-12, std::max(1e-12, p));
                const double w = cnt[0] / p - cnt[1] / (1.0 - p);
                grad += w * c.conjugate();
            }
            grad = ((grad + grad.adjoint()) / 2.0).eval();
            const Eigen::Matrix4cd candidate = project_physical(chi + step * grad);
            const double cand_ll = log_likelihood(candidate, cells);
            if (cand_ll >= ll) {
                chi = candidate;
                ll = cand_ll;
                step *= 1.2;
            } else {
                step *= 0.5;
                if (step < 1e-18) break;
            }
        }
    }

    return ProcessMatrix{chi};
}

ProcessMatrix chi_of_unitary(const Mat& u) {
    if (u.rows() != 2) throw DimensionError("chi_of_unitary expects a single-qubit unitary");
    const Eigen::Vector4cd c = pauli_vec(u);
    return ProcessMatrix{c * c.adjoint()};
}

ProcessMatrix chi_depolarizing() {
    return ProcessMatrix{Eigen::Matrix4cd::Identity() / 4.0};
}

double average_fidelity(const ProcessMatrix& est, const Gate& target) {
    if (target.matrix().rows() != 2)
        throw DimensionError("average_fidelity expects a single-qubit target");
    const double tr = est.chi.trace().real();
    if (std::abs(tr - 1.0) > 1e-6)
        throw DimensionError("chi matrix not trace-normalized");
    const Eigen::Matrix4cd target_chi = chi_of_unitary(target.matrix()).chi;
    const double fe = (target_chi * est.chi).trace().real();
    return (2.0 * fe + 1.0) / 3.0;
}

double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b) {
    // Uhlmann fidelity of the normalized chi matrices
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(a.chi);
    Eigen::Vector4d vals = es.eigenvalues().cwiseMax(0.0);
    const Eigen::Matrix4cd sqrt_a = es.eigenvectors() *
                                    vals.cwiseSqrt().asDiagonal() *
                                    es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> inner(sqrt_a * b.chi * sqrt_a);
    const double root_sum = inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return root_sum * root_sum;
}

void bloch_action(const ProcessMatrix& chi, Eigen::Matrix3d& m, Eigen::Vector3d& t) {
    const Eigen::Matrix4d ptm = ptm_from_chi(chi.chi);
    m = ptm.block<3, 3>(1, 1);
    t = ptm.block<3, 1>(1, 0);
}

BlochMapExport bloch_export(const ProcessMatrix& chi, int n_polar, int n_azimuth) {
    Eigen::Matrix3d m;
    Eigen::Vector3d t;
    bloch_action(chi, m, t);
    BlochMapExport out;
    int color = 0;
    for (int ip = 0; ip < n_polar; ++ip) {
        const double theta = M_PI * ip / (n_polar - 1);
        for (int ia = 0; ia < n_azimuth; ++ia) {
            const double phi = 2 * M_PI * ia / n_azimuth;
            Eigen::Vector3d r(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                              std::cos(theta));
            out.rows.push_back({r, m * r + t, color++});
            if (ip == 0 || ip == n_polar - 1) break;  // poles once
        }
    }
    return out;
}

Pipeline ideal_pipeline(const Gate& u) {
    return [u](const PureState& prep, PauliAxis basis, RandomStream& rng) {
        const PureState out = apply_gate(prep, u, {0});
        const Eigen::Matrix2cd rho = out.amplitudes() * out.amplitudes().adjoint();
        return sample_bit(prob_one_in_basis(rho, basis), rng);
    };
}

Pipeline depolarizing_pipeline() {
    return [](const PureState&, PauliAxis, RandomStream& rng) { return rng.bit(); };
}

Pipeline qfhe_qubit_pipeline(const CircuitDescription& circuit, const FheParams& fhe_params,
                             bool wrong_key, std::uint64_t key_seed) {
    // the decrypting key pair: matching pairs are regenerated per shot; the
    // wrong-key experiment decrypts with this unrelated, fixed pair instead
    RandomStream key_rng(splitmix64(key_seed ^ 0x5bf03635ULL));
    auto rogue = std::make_shared<FheKeyPair>(keygen(fhe_params, key_rng));
    return [circuit, fhe_params, wrong_key, rogue](const PureState& prep, PauliAxis basis,
                                                   RandomStream& rng) {
        const Prepared p = prepare(prep, fhe_params, rng);
        const EvalTranscript t =
            evaluate(p.ciphertext, p.evaluation_key, circuit, Backend::qubit, rng);
        const FheKeyPair& kp = wrong_key ? *rogue : p.secret->fhe_keys();
        const Eigen::Matrix2cd rho = decrypt_output_density(t, kp);
        return sample_bit(prob_one_in_basis(rho, basis), rng);
    };
}

// ---- photonic pipeline with branch caching ----

struct OpticsPipeline::Impl {
    CircuitDescription circuit;
    optics::NoiseParams noise;
    FheParams fhe_params;
    bool wrong_key;
    FheKeyPair kp;      // Alice's pair, fixed across shots
    FheKeyPair rogue;   // unrelated pair for the wrong-key experiment

    mutable std::shared_mutex mutex;
    // key: (prep amplitudes quantized exactly) x (pad bits)
    mutable std::map<std::array<double, 4>, std::array<OpticalCaseRun, 16>> cache;
    mutable std::map<std::array<double, 4>, std::array<bool, 16>> cache_ready;

    const OpticalCaseRun& branch_set(const PureState& prep, int a, int b, int q, int r) const {
        std::array<double, 4> key{prep.amplitudes()(0).real(), prep.amplitudes()(0).imag(),
                                  prep.amplitudes()(1).real(), prep.amplitudes()(1).imag()};
        const int pad_index = a * 8 + b * 4 + q * 2 + r;
        {
            std::shared_lock lock(mutex);
            auto it = cache.find(key);
            if (it != cache.end() && cache_ready.at(key)[static_cast<std::size_t>(pad_index)])
                return it->second[static_cast<std::size_t>(pad_index)];
        }
        // build outside the exclusive section
        EvaluationKey ek;
        ek.xi_a.push_back(realize_ancilla(a, q));
        ek.xi_b.push_back(realize_ancilla(b, r));
        const PureState cipher = encrypt(prep, {a, b});
        OpticalCaseRun run = run_optical_circuit(cipher, ek, circuit, noise);
        std::unique_lock lock(mutex);
        auto& slot = cache[key];
        auto& ready = cache_ready[key];
        if (!ready[static_cast<std::size_t>(pad_index)]) {
            slot[static_cast<std::size_t>(pad_index)] = std::move(run);
            ready[static_cast<std::size_t>(pad_index)] = true;
        }
        return slot[static_cast<std::size_t>(pad_index)];
    }
};

OpticsPipeline::OpticsPipeline(const CircuitDescription& circuit,
                               const optics::NoiseParams& noise, const FheParams& fhe_params,
                               bool wrong_key, std::uint64_t key_seed)
    : impl_(std::make_shared<Impl>()),
      discarded_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
    impl_->circuit = circuit;
    impl_->circuit.validate();
    impl_->noise = noise;
    impl_->fhe_params = fhe_params;
    impl_->wrong_key = wrong_key;
    RandomStream key_rng(splitmix64(key_seed ^ 0x9d2c5680ULL));
    impl_->kp = keygen(fhe_params, key_rng);
    impl_->rogue = keygen(fhe_params, key_rng);
}

int OpticsPipeline::operator()(const PureState& prep, PauliAxis basis, RandomStream& rng) const {
    const Impl& im = *impl_;
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const int a = rng.bit(), b = rng.bit(), q = rng.bit(), r = rng.bit();
        const OpticalCaseRun& run = im.branch_set(prep, a, b, q, r);
        const double u = rng.uniform();
        if (u >= run.success_probability) {
            ++*discarded_;
            continue;  // fresh pads next attempt
        }
        double acc = 0;
        const OpticalBranch* chosen = &run.branches.back();
        for (const OpticalBranch& br : run.branches) {
            acc += br.probability;
            if (u < acc) {
                chosen = &br;
                break;
            }
        }
        // the classical protocol: encrypt pads, fold the evaluation's key
        // expressions homomorphically, decrypt with the chosen key pair
        RandomStream enc_rng = rng.derive(0xabcd + static_cast<std::uint64_t>(attempt));
        EvaluationKey ek;
        ek.xi_a.push_back(realize_ancilla(a, q));
        ek.xi_b.push_back(realize_ancilla(b, r));
        auto& bits = ek.encrypted_bits;
        bits.emplace(Symbol::pad_a(0), enc(a, im.kp.public_key, enc_rng));
        bits.emplace(Symbol::pad_b(0), enc(b, im.kp.public_key, enc_rng));
        bits.emplace(Symbol::mask_q(0), enc(q, im.kp.public_key, enc_rng));
        bits.emplace(Symbol::mask_r(0), enc(r, im.kp.public_key, enc_rng));
        bits.emplace(Symbol::prod_ab(0), enc(a & b, im.kp.public_key, enc_rng));

        const KeyExprPair exprs = optical_final_exprs(im.circuit, chosen->k1, chosen->k2);
        const CipherBit enc_z = fold_expr_public(exprs.z, ek);
        const CipherBit enc_x = fold_expr_public(exprs.x, ek);
        const FheKeyPair& kp = im.wrong_key ? im.rogue : im.kp;
        const int z = dec(enc_z, kp.secret);
        const int x = dec(enc_x, kp.secret);

        const Mat pad = pad_operator(z, x);
        const Eigen::Matrix2cd rho = pad * chosen->conditional_output * pad.adjoint();
        return sample_bit(prob_one_in_basis(rho, basis), rng);
    }
    throw PostSelectionFailure("photonic post-selection never succeeded");
}

}  // namespace qfhe::tomo
