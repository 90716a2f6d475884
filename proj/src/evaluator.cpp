#include "qfhe/evaluator.hpp"

#include <algorithm>
#include <cmath>

namespace qfhe {

std::string canonical_case_name(CanonicalCase c) {
    switch (c) {
        case CanonicalCase::t: return "t";
        case CanonicalCase::th: return "th";
        case CanonicalCase::thp: return "thp";
    }
    return "?";
}

Gate canonical_case_unitary(CanonicalCase c) {
    const Mat t = Gate::make(GateKind::T).matrix();
    const Mat h = Gate::make(GateKind::H).matrix();
    const Mat p = Gate::make(GateKind::P).matrix();
    switch (c) {
        case CanonicalCase::t: return Gate::custom(t, "T");
        case CanonicalCase::th: return Gate::custom(t * h, "TH");
        case CanonicalCase::thp: return Gate::custom(t * h * p, "THP");
    }
    throw EvaluationError("unknown canonical case");
}

CircuitDescription CircuitDescription::canonical(CanonicalCase c) {
    CircuitDescription d;
    d.num_wires = 1;
    switch (c) {
        case CanonicalCase::t:
            d.gates = {{GateKind::T, {0}}};
            break;
        case CanonicalCase::th:
            d.gates = {{GateKind::H, {0}}, {GateKind::T, {0}}};
            break;
        case CanonicalCase::thp:
            d.gates = {{GateKind::P, {0}}, {GateKind::H, {0}}, {GateKind::T, {0}}};
            break;
    }
    return d;
}

int CircuitDescription::t_count() const {
    int n = 0;
    for (const auto& g : gates)
        if (g.kind == GateKind::T) ++n;
    return n;
}

int CircuitDescription::t_depth() const {
    // conservative: layers of T per wire, entanglers tie wires together
    std::vector<int> depth(static_cast<std::size_t>(num_wires), 0);
    for (const auto& g : gates) {
        if (g.kind == GateKind::T) {
            ++depth[static_cast<std::size_t>(g.wires.at(0))];
        } else if (g.wires.size() == 2) {
            const int d = std::max(depth[static_cast<std::size_t>(g.wires[0])],
                                   depth[static_cast<std::size_t>(g.wires[1])]);
            depth[static_cast<std::size_t>(g.wires[0])] = d;
            depth[static_cast<std::size_t>(g.wires[1])] = d;
        }
    }
    return *std::max_element(depth.begin(), depth.end());
}

void CircuitDescription::validate() const {
    if (num_wires < 1 || num_wires > kMaxQubits)
        throw EvaluationError("circuit wire count out of range");
    for (const auto& g : gates) {
        switch (g.kind) {
            case GateKind::I:
            case GateKind::X:
            case GateKind::Y:
            case GateKind::Z:
            case GateKind::H:
            case GateKind::P:
            case GateKind::Pdag:
            case GateKind::T:
                if (g.wires.size() != 1) throw EvaluationError("single-qubit gate wire list");
                break;
            case GateKind::CNOT:
            case GateKind::CZ:
                if (g.wires.size() != 2 || g.wires[0] == g.wires[1])
                    throw EvaluationError("two-qubit gate needs two distinct wires");
                break;
            default:
                throw UnsupportedGateError("unsupported gate in circuit: " + gate_name(g.kind));
        }
        for (int w : g.wires)
            if (w < 0 || w >= num_wires) throw EvaluationError("gate wire out of range");
    }
    if (t_depth() > 1)
        throw EvaluationError("T-depth > 1 is outside the supported regime");
}

Prepared prepare_register(const std::vector<PureState>& plaintexts, const FheParams& fhe_params,
                          RandomStream& rng) {
    if (plaintexts.empty() || static_cast<int>(plaintexts.size()) > kMaxQubits)
        throw DimensionError("register size out of range");
    FheKeyPair kp = keygen(fhe_params, rng);

    Prepared p{PureState::zero(1), {}, nullptr};
    std::vector<PadKey> pads;
    std::vector<int> qs, rs;
    std::optional<PureState> cipher;
    for (std::size_t w = 0; w < plaintexts.size(); ++w) {
        if (plaintexts[w].num_qubits() != 1)
            throw DimensionError("prepare expects single-qubit plaintexts per wire");
        const PadKey pad = random_pad(rng);
        const int q = rng.bit();
        const int r = rng.bit();
        const PureState c = encrypt(plaintexts[w], pad);
        cipher = cipher ? cipher->tensor(c) : c;
        p.evaluation_key.xi_a.push_back(realize_ancilla(pad.a, q));
        p.evaluation_key.xi_b.push_back(realize_ancilla(pad.b, r));
        auto& bits = p.evaluation_key.encrypted_bits;
        const int wire = static_cast<int>(w);
        bits.emplace(Symbol::pad_a(wire), enc(pad.a, kp.public_key, rng));
        bits.emplace(Symbol::pad_b(wire), enc(pad.b, kp.public_key, rng));
        bits.emplace(Symbol::mask_q(wire), enc(q, kp.public_key, rng));
        bits.emplace(Symbol::mask_r(wire), enc(r, kp.public_key, rng));
        bits.emplace(Symbol::prod_ab(wire), enc(pad.a & pad.b, kp.public_key, rng));
        pads.push_back(pad);
        qs.push_back(q);
        rs.push_back(r);
    }
    p.ciphertext = *cipher;
    p.secret = std::make_shared<AliceSecret>(std::move(pads), std::move(qs), std::move(rs),
                                             std::move(kp));
    return p;
}

Prepared prepare(const PureState& plaintext, const FheParams& fhe_params, RandomStream& rng) {
    return prepare_register({plaintext}, fhe_params, rng);
}

namespace {

// Folds a symbolic key expression into one ciphertext by XOR of the
// front-loaded encryptions; measurement outcomes are already constants.
CipherBit fold_expr(const KeyExpr& e, const EvaluationKey& key) {
    std::optional<CipherBit> acc;
    for (const Symbol& s : e.symbols()) {
        auto it = key.encrypted_bits.find(s);
        if (it == key.encrypted_bits.end())
            throw EvaluationError("no front-loaded encryption for symbol " + s.to_string());
        acc = acc ? hxor(*acc, it->second) : it->second;
    }
    if (!acc) {
        // encryption of zero out of any available bit XORed with itself
        const CipherBit& any = key.encrypted_bits.begin()->second;
        acc = hxor(any, any);
    }
    return hxor_const(*acc, e.constant());
}

struct GadgetCase {
    KeyExpr symbol_part;  // S
    int constant;         // c
    enum class Which { a, b, sum } which;
};

GadgetCase classify_case(const KeyExpr& x_expr, int wire) {
    GadgetCase g{x_expr.symbol_part(), x_expr.constant(), GadgetCase::Which::a};
    const KeyExpr ea = KeyExpr::symbol(Symbol::pad_a(wire));
    const KeyExpr eb = KeyExpr::symbol(Symbol::pad_b(wire));
    if (g.symbol_part == ea)
        g.which = GadgetCase::Which::a;
    else if (g.symbol_part == eb)
        g.which = GadgetCase::Which::b;
    else if (g.symbol_part == (ea ^ eb))
        g.which = GadgetCase::Which::sum;
    else
        throw EvaluationError("T gadget needs an X key in {a, b, a+b} of its wire, got " +
                              x_expr.to_string());
    return g;
}

}  // namespace

static EvalTranscript evaluate_qubit(const PureState& ciphertext, const EvaluationKey& key,
                                     const CircuitDescription& circuit, RandomStream& rng) {
    EvalTranscript t;
    t.backend = Backend::qubit;
    t.gates = circuit.gates;
    t.seed = rng.seed();

    const int n = circuit.num_wires;
    PureState reg = ciphertext;
    std::vector<KeyExprPair> keys;
    for (int w = 0; w < n; ++w)
        keys.push_back({KeyExpr::symbol(Symbol::pad_a(w)), KeyExpr::symbol(Symbol::pad_b(w))});

    int gadget_index = 0;
    std::vector<bool> ancilla_used(static_cast<std::size_t>(n), false);

    for (const GateOp& op : circuit.gates) {
        if (op.kind != GateKind::T) {
            reg = apply_gate(reg, Gate::make(op.kind), op.wires);
            key_update(op.kind, op.wires, keys);
            continue;
        }
        const int w = op.wires.at(0);
        if (ancilla_used[static_cast<std::size_t>(w)])
            throw EvaluationError("ancilla pair for wire already consumed");
        ancilla_used[static_cast<std::size_t>(w)] = true;

        reg = apply_gate(reg, Gate::make(GateKind::T), {w});
        keys[static_cast<std::size_t>(w)].z ^= keys[static_cast<std::size_t>(w)].x;

        const GadgetCase gcase = classify_case(keys[static_cast<std::size_t>(w)].x, w);
        const std::string tag = "t" + std::to_string(gadget_index++);

        PureState ancilla = PureState::zero(1);
        KeyExpr mask;
        switch (gcase.which) {
            case GadgetCase::Which::a:
                ancilla = key.xi_a.at(static_cast<std::size_t>(w));
                mask = KeyExpr::symbol(Symbol::mask_q(w));
                break;
            case GadgetCase::Which::b:
                ancilla = key.xi_b.at(static_cast<std::size_t>(w));
                mask = KeyExpr::symbol(Symbol::mask_r(w));
                break;
            case GadgetCase::Which::sum: {
                // teleport between the ancillas to sum the hidden phases
                PureState joint = key.xi_a.at(static_cast<std::size_t>(w))
                                      .tensor(key.xi_b.at(static_cast<std::size_t>(w)));
                joint = apply_gate(joint, Gate::make(GateKind::CNOT), {0, 1});
                const MeasurementResult m = measure_computational(joint, 1, rng);
                t.measurements.emplace_back(tag + ".k1", m.outcome);
                ancilla = m.collapsed;
                mask = KeyExpr::symbol(Symbol::mask_q(w)) ^ KeyExpr::symbol(Symbol::mask_r(w)) ^
                       KeyExpr::symbol(Symbol::prod_ab(w));
                if (m.outcome) mask ^= KeyExpr::symbol(Symbol::pad_b(w));
                break;
            }
        }

        // gadget: CNOT(data -> ancilla), measure the ancilla
        reg = reg.tensor(ancilla);
        reg = apply_gate(reg, Gate::make(GateKind::CNOT), {w, n});
        const MeasurementResult m = measure_computational(reg, n, rng);
        t.measurements.emplace_back(tag + ".k2", m.outcome);
        reg = m.collapsed;

        keys[static_cast<std::size_t>(w)].z ^= mask;
        if (m.outcome) keys[static_cast<std::size_t>(w)].z ^= gcase.symbol_part;
        if (gcase.constant) {
            reg = apply_gate(reg, Gate::make(GateKind::Pdag), {w});
            keys[static_cast<std::size_t>(w)].z ^= keys[static_cast<std::size_t>(w)].x;
        }
    }

    t.output_state = reg;
    t.final_exprs = keys;
    for (const KeyExprPair& kp : keys)
        t.final_keys.emplace_back(fold_expr(kp.z, key), fold_expr(kp.x, key));
    return t;
}

// -------- photonic backend --------

namespace {

// rails of the photonic layout
constexpr int kDataRail = 0;
constexpr int kAncRail = 1;
constexpr int kAncBRail = 2;
constexpr int kLoss1 = 3;
constexpr int kLoss2 = 4;

struct ParsedCircuit {
    Eigen::Matrix2cd pre = Eigen::Matrix2cd::Identity();   // before the T gate
    Eigen::Matrix2cd post = Eigen::Matrix2cd::Identity();  // after the gadget
    bool has_t = false;
    GadgetCase gcase{KeyExpr::zero(), 0, GadgetCase::Which::a};
    // symbolic key state captured right after the T gate
    KeyExprPair keys_after_t;
    KeyExprPair keys_no_t;  // final keys when the circuit has no T
};

ParsedCircuit parse_single_wire(const CircuitDescription& circuit) {
    if (circuit.num_wires != 1)
        throw EvaluationError("the photonic backend supports single-wire circuits");
    ParsedCircuit pc;
    std::vector<KeyExprPair> keys{{KeyExpr::symbol(Symbol::pad_a(0)),
                                   KeyExpr::symbol(Symbol::pad_b(0))}};
    for (const GateOp& op : circuit.gates) {
        if (op.kind == GateKind::T) {
            if (pc.has_t) throw EvaluationError("photonic backend supports one T gate");
            pc.has_t = true;
            keys[0].z ^= keys[0].x;
            pc.gcase = classify_case(keys[0].x, 0);
            pc.keys_after_t = keys[0];
            continue;
        }
        const Eigen::Matrix2cd u = Gate::make(op.kind).matrix();
        if (pc.has_t)
            pc.post = u * pc.post;
        else
            pc.pre = u * pc.pre;
        key_update(op.kind, op.wires, keys);
    }
    pc.keys_no_t = keys[0];
    if (pc.has_t && pc.gcase.constant)
        // never reachable at T-depth one: constants only enter Z expressions
        throw EvaluationError("photonic gadget with constant-shifted X key unsupported");
    return pc;
}

void apply_pol(optics::FockState& s, int rail, const Eigen::Matrix2cd& u) {
    s = optics::apply_element(std::move(s), optics::OpticalElement::pol_unitary(u, rail));
}

// CNOT(data control -> ancilla target) built from the post-selected CZ with
// balancing attenuators and Hadamard waveplates on the ancilla rail.
void apply_optical_cnot(optics::FockState& s, int data_rail, int anc_rail) {
    const double t_bal = std::sqrt(1.0 / 3.0);
    s = optics::apply_element(std::move(s), optics::OpticalElement::hwp(M_PI / 8, anc_rail));
    s = optics::apply_element(std::move(s),
                              optics::OpticalElement::attenuator(t_bal, data_rail, 0, kLoss1));
    s = optics::apply_element(std::move(s),
                              optics::OpticalElement::attenuator(t_bal, anc_rail, 0, kLoss2));
    s = optics::apply_element(std::move(s),
                              optics::OpticalElement::ppbs(1.0 / 3.0, data_rail, anc_rail));
    s = optics::apply_element(std::move(s), optics::OpticalElement::hwp(M_PI / 8, anc_rail));
}

Vec label_vec(std::initializer_list<double> entries) {
    Vec v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (double e : entries) v(i++) = e;
    return v;
}

}  // namespace

OpticalCaseRun run_optical_circuit(const PureState& ciphertext, const EvaluationKey& key,
                                   const CircuitDescription& circuit,
                                   const optics::NoiseParams& noise) {
    circuit.validate();
    noise.validate();
    const ParsedCircuit pc = parse_single_wire(circuit);
    OpticalCaseRun out;

    if (!pc.has_t) {
        OpticalBranch b;
        b.probability = 1.0;
        const Eigen::Matrix2cd u = pc.pre;
        const Eigen::Vector2cd amps(ciphertext.amplitudes()(0), ciphertext.amplitudes()(1));
        const Eigen::Vector2cd outv = u * amps;
        b.conditional_output = outv * outv.adjoint();
        out.success_probability = 1.0;
        out.branches.push_back(b);
        return out;
    }

    const double v_intra = noise.visibility_intra;
    const double v_inter = noise.visibility_inter;

    const Vec data_label = label_vec({1.0});
    Vec pol_data(2);
    pol_data << ciphertext.amplitudes()(0), ciphertext.amplitudes()(1);

    auto pol_of = [](const PureState& s) {
        Vec v(2);
        v << s.amplitudes()(0), s.amplitudes()(1);
        return v;
    };

    const bool sum_case = pc.gcase.which == GadgetCase::Which::sum;

    optics::FockState s = optics::FockState::vacuum();
    s.create_photon(kDataRail, pol_data, data_label);

    if (!sum_case) {
        // single gate between photons of the same SPDC pair
        const PureState& anc = pc.gcase.which == GadgetCase::Which::a ? key.xi_a.at(0)
                                                                      : key.xi_b.at(0);
        s.create_photon(kAncRail, pol_of(anc), label_vec({std::sqrt(v_intra),
                                                          std::sqrt(1.0 - v_intra)}));
    } else {
        // ancilla pair interferes with itself at v_intra; the data photon is
        // from the other SPDC event, overlapping either ancilla at v_inter
        const double root_intra = std::sqrt(v_intra);
        double x = 0.0;
        if (v_inter < 1.0 - 1e-12)
            x = std::clamp((root_intra - v_inter) / (1.0 - v_inter), 0.0, 1.0);
        const double o = std::sqrt(1.0 - v_inter);
        s.create_photon(kAncRail, pol_of(key.xi_a.at(0)),
                        label_vec({std::sqrt(v_inter), o, 0.0}));
        s.create_photon(kAncBRail, pol_of(key.xi_b.at(0)),
                        label_vec({std::sqrt(v_inter), o * std::sqrt(x),
                                   o * std::sqrt(1.0 - x)}));
    }

    apply_pol(s, kDataRail, pc.pre);
    {
        Eigen::Matrix2cd t_jones = Eigen::Matrix2cd::Identity();
        t_jones(1, 1) = std::polar(1.0, M_PI / 4);
        apply_pol(s, kDataRail, t_jones);
    }

    struct Stage1 {  // after optional phase-add
        int k1;
        double probability;
        optics::FockState state;
    };
    std::vector<Stage1> stage1;
    if (!sum_case) {
        stage1.push_back({-1, 1.0, std::move(s)});
    } else {
        optics::FockState sa = optics::apply_element(std::move(s),
                                                     optics::OpticalElement::pbs(kAncRail, kAncBRail));
        sa = optics::apply_element(std::move(sa), optics::OpticalElement::hwp(M_PI / 8, kAncBRail));
        const double p_coinc = sa.post_select({kAncRail, kAncBRail}, {});
        if (p_coinc > 0) {
            const auto branches = sa.measure_polarization(kAncBRail);
            for (int pol = 0; pol < 2; ++pol) {
                const auto& [p, st] = branches[static_cast<std::size_t>(pol)];
                if (p <= 0) continue;
                stage1.push_back({pol == 1 ? 0 : 1, p_coinc * p, st});
            }
        }
    }

    for (Stage1& st1 : stage1) {
        optics::FockState sg = std::move(st1.state);
        apply_optical_cnot(sg, kDataRail, kAncRail);
        const double p_ps = sg.post_select({kDataRail, kAncRail}, {kLoss1, kLoss2});
        if (p_ps <= 0) continue;
        const auto k2_branches = sg.measure_polarization(kAncRail);
        for (int pol = 0; pol < 2; ++pol) {
            const auto& [p, stf] = k2_branches[static_cast<std::size_t>(pol)];
            if (p <= 0) continue;
            OpticalBranch b;
            b.k1 = st1.k1;
            b.k2 = pol;  // H -> 0, V -> 1
            b.probability = st1.probability * p_ps * p;
            optics::FockState fin = stf;
            apply_pol(fin, kDataRail, pc.post);
            b.conditional_output = fin.polarization_density(kDataRail);
            out.branches.push_back(b);
            out.success_probability += b.probability;
        }
    }
    return out;
}

KeyExprPair optical_final_exprs(const CircuitDescription& circuit, int k1, int k2) {
    const ParsedCircuit pc = parse_single_wire(circuit);
    if (!pc.has_t) return pc.keys_no_t;

    KeyExprPair keys = pc.keys_after_t;
    KeyExpr mask;
    switch (pc.gcase.which) {
        case GadgetCase::Which::a:
            mask = KeyExpr::symbol(Symbol::mask_q(0));
            break;
        case GadgetCase::Which::b:
            mask = KeyExpr::symbol(Symbol::mask_r(0));
            break;
        case GadgetCase::Which::sum:
            mask = KeyExpr::symbol(Symbol::mask_q(0)) ^ KeyExpr::symbol(Symbol::mask_r(0)) ^
                   KeyExpr::symbol(Symbol::prod_ab(0));
            // photonic herald rule: the H herald leaves an extra Z
            if (k1) mask ^= KeyExpr::one();
            break;
    }
    keys.z ^= mask;
    if (k2) keys.z ^= pc.gcase.symbol_part;

    // post-T Cliffords are applied optically after the gadget
    std::vector<KeyExprPair> ks{keys};
    bool after_t = false;
    for (const GateOp& op : circuit.gates) {
        if (op.kind == GateKind::T) {
            after_t = true;
            continue;
        }
        if (after_t) key_update(op.kind, op.wires, ks);
    }
    return ks[0];
}

CipherBit fold_expr_public(const KeyExpr& e, const EvaluationKey& key) {
    return fold_expr(e, key);
}

static EvalTranscript evaluate_optics(const PureState& ciphertext, const EvaluationKey& key,
                                      const CircuitDescription& circuit, RandomStream& rng,
                                      const optics::NoiseParams& noise) {
    EvalTranscript t;
    t.backend = Backend::optics;
    t.gates = circuit.gates;
    t.seed = rng.seed();

    const ParsedCircuit pc = parse_single_wire(circuit);
    const OpticalCaseRun run = run_optical_circuit(ciphertext, key, circuit, noise);

    auto set_output = [&t](const Eigen::Matrix2cd& rho) {
        t.output_density = rho;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
        Vec v(2);
        v << es.eigenvectors()(0, 1), es.eigenvectors()(1, 1);
        t.output_state = PureState::from_amplitudes(v);
    };

    if (!pc.has_t) {
        t.final_exprs = {pc.keys_no_t};
        set_output(run.branches.front().conditional_output);
        t.final_keys.emplace_back(fold_expr(pc.keys_no_t.z, key),
                                  fold_expr(pc.keys_no_t.x, key));
        return t;
    }

    const double u = rng.uniform();
    if (u >= run.success_probability)
        throw PostSelectionFailure("photonic post-selection failed");
    double acc = 0;
    const OpticalBranch* chosen = &run.branches.back();
    for (const OpticalBranch& b : run.branches) {
        acc += b.probability;
        if (u < acc) {
            chosen = &b;
            break;
        }
    }

    if (pc.gcase.which == GadgetCase::Which::sum)
        t.measurements.emplace_back("t0.k1", chosen->k1);
    t.measurements.emplace_back("t0.k2", chosen->k2);

    const KeyExprPair keys = optical_final_exprs(circuit, chosen->k1, chosen->k2);
    t.final_exprs = {keys};
    set_output(chosen->conditional_output);
    t.final_keys.emplace_back(fold_expr(keys.z, key), fold_expr(keys.x, key));
    return t;
}

EvalTranscript evaluate(const PureState& ciphertext, const EvaluationKey& key,
                        const CircuitDescription& circuit, Backend backend, RandomStream& rng,
                        const optics::NoiseParams& noise) {
    circuit.validate();
    if (circuit.num_wires != ciphertext.num_qubits())
        throw DimensionError("ciphertext register does not match circuit wires");
    if (static_cast<int>(key.xi_a.size()) < circuit.num_wires)
        throw EvaluationError("not enough ancilla pairs for the circuit wires");
    if (backend == Backend::qubit) return evaluate_qubit(ciphertext, key, circuit, rng);
    return evaluate_optics(ciphertext, key, circuit, rng, noise);
}

std::vector<std::pair<int, int>> decrypt_final_keys(const EvalTranscript& t, const FheKeyPair& kp) {
    std::vector<std::pair<int, int>> out;
    for (const auto& [enc_z, enc_x] : t.final_keys)
        out.emplace_back(dec(enc_z, kp.secret), dec(enc_x, kp.secret));
    return out;
}

PureState decrypt_output(const EvalTranscript& t, const FheKeyPair& kp) {
    const auto keys = decrypt_final_keys(t, kp);
    PureState s = t.output_state;
    for (std::size_t w = 0; w < keys.size(); ++w) {
        const auto [z, x] = keys[w];
        if (x) s = apply_gate(s, Gate::make(GateKind::X), {static_cast<int>(w)});
        if (z) s = apply_gate(s, Gate::make(GateKind::Z), {static_cast<int>(w)});
    }
    return s;
}

Eigen::Matrix2cd decrypt_output_density(const EvalTranscript& t, const FheKeyPair& kp) {
    if (!t.output_density) {
        const PureState s = decrypt_output(t, kp);
        return s.amplitudes() * s.amplitudes().adjoint();
    }
    const auto keys = decrypt_final_keys(t, kp);
    const Mat pad = pad_operator(keys.at(0).first, keys.at(0).second);
    return pad * (*t.output_density) * pad.adjoint();
}

std::vector<std::uint8_t> EvaluationKey::serialize() const {
    std::vector<std::uint8_t> out;
    auto put_state = [&out](const PureState& s) {
        for (Eigen::Index i = 0; i < s.dim(); ++i) {
            const Complex c = s.amplitudes()(i);
            const double parts[2] = {c.real(), c.imag()};
            const auto* bytes = reinterpret_cast<const std::uint8_t*>(parts);
            out.insert(out.end(), bytes, bytes + sizeof(parts));
        }
    };
    for (const PureState& s : xi_a) put_state(s);
    for (const PureState& s : xi_b) put_state(s);
    for (const auto& [sym, bit] : encrypted_bits) {
        const std::string name = sym.to_string();
        out.insert(out.end(), name.begin(), name.end());
        const auto ser = bit.serialize();
        out.insert(out.end(), ser.begin(), ser.end());
    }
    return out;
}

}  // namespace qfhe
