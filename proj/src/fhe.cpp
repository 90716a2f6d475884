#include "qfhe/fhe.hpp"

#include <cmath>
#include <cstring>

namespace qfhe {

namespace {

constexpr int kMockBudget = 1 << 20;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffULL));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

struct Reader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos + 1 > bytes.size()) throw FheError("truncated FHE blob");
        return bytes[pos++];
    }
    std::uint32_t u32() {
        if (pos + 4 > bytes.size()) throw FheError("truncated FHE blob");
        std::uint32_t v = bytes[pos] | (bytes[pos + 1] << 8) |
                          (bytes[pos + 2] << 16) |
                          (static_cast<std::uint32_t>(bytes[pos + 3]) << 24);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        const std::uint64_t lo = u32();
        return lo | (static_cast<std::uint64_t>(u32()) << 32);
    }
};

// Key blob header: [u8 scheme][u32 key id][u32 budget][u32 dimension]
// [u32 modulus][u32 word count][words...]
struct KeyView {
    FheScheme scheme;
    std::uint32_t key_id;
    int budget;
    std::uint32_t dimension;
    std::uint32_t modulus;
    std::vector<std::uint32_t> words;
};

KeyView parse_key(std::span<const std::uint8_t> bytes) {
    Reader r{bytes};
    KeyView k;
    k.scheme = static_cast<FheScheme>(r.u8());
    k.key_id = r.u32();
    k.budget = static_cast<int>(r.u32());
    k.dimension = r.u32();
    k.modulus = r.u32();
    const std::uint32_t n = r.u32();
    k.words.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) k.words.push_back(r.u32());
    return k;
}

std::vector<std::uint8_t> pack_key(const KeyView& k) {
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(k.scheme));
    put_u32(out, k.key_id);
    put_u32(out, static_cast<std::uint32_t>(k.budget));
    put_u32(out, k.dimension);
    put_u32(out, k.modulus);
    put_u32(out, static_cast<std::uint32_t>(k.words.size()));
    for (std::uint32_t w : k.words) put_u32(out, w);
    return out;
}

std::uint64_t prf(std::uint64_t key, std::uint64_t nonce) {
    return splitmix64(key ^ splitmix64(nonce ^ 0xa0761d6478bd642fULL));
}

// Rounded Gaussian noise sample.
std::int64_t sample_noise(double stddev, RandomStream& rng) {
    return static_cast<std::int64_t>(std::llround(stddev * rng.gaussian()));
}

std::uint32_t mod_reduce(std::int64_t v, std::uint32_t q) {
    std::int64_t m = v % static_cast<std::int64_t>(q);
    if (m < 0) m += q;
    return static_cast<std::uint32_t>(m);
}

}  // namespace

int FheParams::xor_budget() const {
    if (scheme == FheScheme::mock) return kMockBudget;
    // A fresh encryption carries the noise of a random half of the public
    // samples: a zero-mean sum with standard deviation sigma*sqrt(m/2).
    // Six sigma of that is the per-ciphertext magnitude; chains of XORs add
    // noise linearly in this bound and stay decodable below q/4.
    const double per_ct =
        std::max(1.0, std::ceil(6.0 * noise_stddev * std::sqrt(public_samples / 2.0)));
    const int budget = static_cast<int>(std::floor(modulus / 4.0 / per_ct)) - 1;
    if (budget <= 0)
        throw FheError("FHE parameters leave no XOR budget (modulus too small for noise)");
    return budget;
}

FheKeyPair keygen(const FheParams& params, RandomStream& rng) {
    if (params.scheme == FheScheme::lwe_additive &&
        (params.lwe_dimension <= 0 || params.modulus < 8 || params.public_samples <= 0))
        throw FheError("invalid LWE parameters");
    const int budget = params.xor_budget();

    FheKeyPair kp;
    kp.params = params;
    kp.key_id = static_cast<std::uint32_t>(rng.next_u64());

    if (params.scheme == FheScheme::mock) {
        const std::uint64_t prf_key = rng.next_u64();
        KeyView k{params.scheme, kp.key_id, budget, 0, 0, {}};
        k.words.push_back(static_cast<std::uint32_t>(prf_key & 0xffffffffULL));
        k.words.push_back(static_cast<std::uint32_t>(prf_key >> 32));
        kp.secret.bytes = pack_key(k);
        kp.public_key.bytes = kp.secret.bytes;  // symmetric mock
        return kp;
    }

    const std::uint32_t q = params.modulus;
    const int n = params.lwe_dimension;
    const int m = params.public_samples;
    const std::int64_t clip = static_cast<std::int64_t>(std::max(1.0, 6.0 * params.noise_stddev));

    KeyView sk{params.scheme, kp.key_id, budget, static_cast<std::uint32_t>(n), q, {}};
    for (int i = 0; i < n; ++i)
        sk.words.push_back(static_cast<std::uint32_t>(rng.next_u64() % q));

    // Public key: m LWE samples (a_i, <a_i, s> + e_i).
    KeyView pk{params.scheme, kp.key_id, budget, static_cast<std::uint32_t>(n), q, {}};
    pk.words.push_back(static_cast<std::uint32_t>(m));
    for (int i = 0; i < m; ++i) {
        std::int64_t dot = 0;
        for (int j = 0; j < n; ++j) {
            const std::uint32_t a = static_cast<std::uint32_t>(rng.next_u64() % q);
            pk.words.push_back(a);
            dot += static_cast<std::int64_t>(a) * sk.words[static_cast<std::size_t>(j)];
        }
        std::int64_t e = sample_noise(params.noise_stddev, rng);
        e = std::max(-clip, std::min(clip, e));
        pk.words.push_back(mod_reduce(dot + e, q));
    }
    kp.secret.bytes = pack_key(sk);
    kp.public_key.bytes = pack_key(pk);
    return kp;
}

CipherBit enc(int bit, const FhePublicKey& pk_bytes, RandomStream& rng) {
    if (bit != 0 && bit != 1) throw FheError("plaintext must be a bit");
    const KeyView pk = parse_key(pk_bytes.bytes);
    CipherBit c;
    c.scheme_ = pk.scheme;
    c.key_id_ = pk.key_id;
    c.budget_ = pk.budget;
    c.noise_level_ = 0;

    if (pk.scheme == FheScheme::mock) {
        const std::uint64_t prf_key =
            pk.words.at(0) | (static_cast<std::uint64_t>(pk.words.at(1)) << 32);
        const std::uint64_t nonce = rng.next_u64();
        const int masked = bit ^ static_cast<int>(prf(prf_key, nonce) & 1);
        put_u32(c.payload_, 1);  // nonce count
        put_u64(c.payload_, nonce);
        c.payload_.push_back(static_cast<std::uint8_t>(masked));
        return c;
    }

    const std::uint32_t q = pk.modulus;
    const std::uint32_t n = pk.dimension;
    const std::uint32_t m = pk.words.at(0);
    // Random binary subset-sum of the public samples, plus bit * q/2.
    std::vector<std::int64_t> acc(n + 1, 0);
    for (std::uint32_t i = 0; i < m; ++i) {
        if (!rng.bit()) continue;
        const std::size_t base = 1 + static_cast<std::size_t>(i) * (n + 1);
        for (std::uint32_t j = 0; j <= n; ++j)
            acc[j] += pk.words.at(base + j);
    }
    acc[n] += static_cast<std::int64_t>(bit) * (q / 2);
    put_u32(c.payload_, n);
    put_u32(c.payload_, q);
    std::vector<std::uint8_t>& out = c.payload_;
    for (std::uint32_t j = 0; j <= n; ++j) put_u32(out, mod_reduce(acc[j], q));
    return c;
}

int dec(const CipherBit& c, const FheSecretKey& sk_bytes) {
    const KeyView sk = parse_key(sk_bytes.bytes);
    Reader r{c.payload_};
    if (c.scheme_ == FheScheme::mock) {
        const std::uint64_t prf_key =
            sk.words.at(0) | (static_cast<std::uint64_t>(sk.words.at(1)) << 32);
        const std::uint32_t count = r.u32();
        int mask = 0;
        for (std::uint32_t i = 0; i < count; ++i)
            mask ^= static_cast<int>(prf(prf_key, r.u64()) & 1);
        return static_cast<int>(r.u8()) ^ mask;
    }
    const std::uint32_t n = r.u32();
    const std::uint32_t q = r.u32();
    std::int64_t dot = 0;
    for (std::uint32_t j = 0; j < n; ++j) {
        const std::uint32_t a = r.u32();
        const std::uint32_t s = j < sk.words.size() ? sk.words[j] : 0;
        dot += static_cast<std::int64_t>(a) * s;
    }
    const std::uint32_t b = r.u32();
    const std::uint32_t diff = mod_reduce(static_cast<std::int64_t>(b) - dot, q);
    // Message in the high bit: closer to q/2 than to 0 (mod q) decodes as 1.
    return (diff > q / 4 && diff <= 3 * (static_cast<std::int64_t>(q) / 4)) ? 1 : 0;
}

CipherBit hxor(const CipherBit& x, const CipherBit& y) {
    if (x.scheme_ != y.scheme_) throw FheError("hxor across schemes");
    if (x.key_id_ != y.key_id_) throw FheError("hxor across key pairs");
    const int level = x.noise_level_ + y.noise_level_ + 1;
    if (level > x.budget_)
        throw BudgetError("XOR budget exceeded: level " + std::to_string(level) +
                          " > budget " + std::to_string(x.budget_));
    CipherBit out;
    out.scheme_ = x.scheme_;
    out.key_id_ = x.key_id_;
    out.budget_ = x.budget_;
    out.noise_level_ = level;

    Reader rx{x.payload_}, ry{y.payload_};
    if (x.scheme_ == FheScheme::mock) {
        const std::uint32_t nx = rx.u32(), ny = ry.u32();
        put_u32(out.payload_, nx + ny);
        std::vector<std::uint8_t> nonces;
        for (std::uint32_t i = 0; i < nx; ++i) put_u64(nonces, rx.u64());
        for (std::uint32_t i = 0; i < ny; ++i) put_u64(nonces, ry.u64());
        out.payload_.insert(out.payload_.end(), nonces.begin(), nonces.end());
        out.payload_.push_back(static_cast<std::uint8_t>(rx.u8() ^ ry.u8()));
        return out;
    }
    const std::uint32_t n = rx.u32();
    const std::uint32_t q = rx.u32();
    if (ry.u32() != n || ry.u32() != q) throw FheError("hxor ciphertext shape mismatch");
    put_u32(out.payload_, n);
    put_u32(out.payload_, q);
    for (std::uint32_t j = 0; j <= n; ++j)
        put_u32(out.payload_, mod_reduce(static_cast<std::int64_t>(rx.u32()) + ry.u32(), q));
    return out;
}

CipherBit hxor_const(const CipherBit& x, int c) {
    if (c != 0 && c != 1) throw FheError("constant must be a bit");
    CipherBit out = x;
    if (c == 0) return out;
    if (x.scheme_ == FheScheme::mock) {
        out.payload_.back() ^= 1;
        return out;
    }
    Reader r{x.payload_};
    const std::uint32_t n = r.u32();
    const std::uint32_t q = r.u32();
    // Adjust the b word in place: payload layout is [n][q][a_0..a_{n-1}][b].
    const std::size_t b_off = 8 + static_cast<std::size_t>(n) * 4;
    std::uint32_t b = out.payload_[b_off] | (out.payload_[b_off + 1] << 8) |
                      (out.payload_[b_off + 2] << 16) |
                      (static_cast<std::uint32_t>(out.payload_[b_off + 3]) << 24);
    b = mod_reduce(static_cast<std::int64_t>(b) + q / 2, q);
    out.payload_[b_off] = static_cast<std::uint8_t>(b & 0xff);
    out.payload_[b_off + 1] = static_cast<std::uint8_t>((b >> 8) & 0xff);
    out.payload_[b_off + 2] = static_cast<std::uint8_t>((b >> 16) & 0xff);
    out.payload_[b_off + 3] = static_cast<std::uint8_t>((b >> 24) & 0xff);
    return out;
}

std::vector<std::uint8_t> CipherBit::serialize() const {
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(scheme_));
    put_u32(out, key_id_);
    put_u32(out, static_cast<std::uint32_t>(noise_level_));
    put_u32(out, static_cast<std::uint32_t>(budget_));
    put_u32(out, static_cast<std::uint32_t>(payload_.size()));
    out.insert(out.end(), payload_.begin(), payload_.end());
    return out;
}

CipherBit CipherBit::deserialize(std::span<const std::uint8_t> bytes) {
    Reader r{bytes};
    CipherBit c;
    c.scheme_ = static_cast<FheScheme>(r.u8());
    if (c.scheme_ != FheScheme::mock && c.scheme_ != FheScheme::lwe_additive)
        throw FheError("unknown ciphertext scheme tag");
    c.key_id_ = r.u32();
    c.noise_level_ = static_cast<int>(r.u32());
    c.budget_ = static_cast<int>(r.u32());
    const std::uint32_t len = r.u32();
    if (r.pos + len > bytes.size()) throw FheError("truncated ciphertext payload");
    c.payload_.assign(bytes.begin() + static_cast<std::ptrdiff_t>(r.pos),
                      bytes.begin() + static_cast<std::ptrdiff_t>(r.pos + len));
    return c;
}

}  // namespace qfhe
