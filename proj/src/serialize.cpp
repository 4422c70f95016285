#include "gpe/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace gpe {

std::string profile_to_json(const Profile& p) {
    nlohmann::json j;
    j["order"] = p.order;
    j["n"] = p.n;
    j["method"] = p.method;
    nlohmann::json counts = nlohmann::json::object();
    for (std::uint32_t i = 0; i < p.counts.size(); ++i) {
        counts[pattern_to_string(PatternId{p.order, i})] = u128_to_string(p.counts[i]);
    }
    j["counts"] = counts;
    return j.dump();
}

void write_profile_csv(std::ostream& out, const Profile& p) {
    out << "pattern,count\n";
    for (std::uint32_t i = 0; i < p.counts.size(); ++i) {
        out << pattern_to_string(PatternId{p.order, i}) << ',' << u128_to_string(p.counts[i]) << '\n';
    }
}

std::string entropy_to_json(const EntropyValue& ev) {
    nlohmann::json j;
    j["kind"] = entropy_kind_name(ev.kind);
    j["order"] = ev.order;
    if (ev.delay.has_value()) {
        j["delay"] = *ev.delay;
    } else if (!ev.delays.empty()) {
        j["delay"] = ev.delays;
    } else {
        j["delay"] = nullptr;
    }
    j["raw_nats"] = ev.raw;
    j["normalized"] = ev.normalized;
    j["sample_size"] = u128_to_string(ev.sample_size);
    j["method"] = ev.method;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Basis cache
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

void encode_one_basis(std::ostream& os, const Basis& b) {
    os << "basis " << b.order << ' ' << b.entries.size() << '\n';
    for (const BasisEntry& e : b.entries) {
        if (e.direct_3214) {
            os << "entry direct\n";
        } else {
            os << "entry tree " << e.tree.encoding() << '\n';
        }
        os << "orders " << e.coeffs.by_order.size() << '\n';
        for (std::size_t m = 0; m < e.coeffs.by_order.size(); ++m) {
            os << "coeff " << (m + 1);
            for (std::uint64_t c : e.coeffs.by_order[m]) os << ' ' << c;
            os << '\n';
        }
    }
    os << "det " << b.det.to_string() << '\n';
    for (const auto& row : b.scaled_inverse) {
        os << "inv";
        for (const BigInt& x : row) os << ' ' << x.to_string();
        os << '\n';
    }
}

// The cached inverse drives every profile recovery, so a decoded basis is
// re-verified against its defining identity  (det * M^-1) * M == det * I.
void verify_basis(const Basis& b) {
    const std::size_t r = b.entries.size();
    if (r != factorial(static_cast<std::uint32_t>(b.order))) throw ValidationError("basis: bad entry count");
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            BigInt dot(0);
            for (std::size_t q = 0; q < r; ++q) {
                const auto& comp = b.entries[q].coeffs.by_order[static_cast<std::size_t>(b.order - 1)];
                dot += b.scaled_inverse[i][q] * BigInt(static_cast<std::int64_t>(comp[j]));
            }
            const BigInt expect = i == j ? b.det : BigInt(0);
            if (dot != expect) throw ValidationError("basis: inverse verification failed");
        }
    }
}

Basis decode_one_basis(std::istream& is, int order, std::size_t entry_count) {
    Basis b;
    b.order = order;
    std::string tok;
    for (std::size_t e = 0; e < entry_count; ++e) {
        BasisEntry entry;
        if (!(is >> tok) || tok != "entry") throw ValidationError("basis cache: expected entry");
        if (!(is >> tok)) throw ValidationError("basis cache: truncated entry");
        if (tok == "direct") {
            entry.direct_3214 = true;
            entry.coeffs.tree_encoding = "[3214]";
            entry.coeffs.vertices = order;
        } else if (tok == "tree") {
            std::string line;
            std::getline(is, line);
            const std::string enc = line.empty() ? line : line.substr(1);  // strip leading space
            entry.tree = CornerTree::from_encoding(enc);
            if (entry.tree.encoding() != enc) throw ValidationError("basis cache: non-canonical tree");
            entry.coeffs.tree_encoding = enc;
            entry.coeffs.vertices = entry.tree.size();
        } else {
            throw ValidationError("basis cache: bad entry kind");
        }
        std::size_t norders = 0;
        if (!(is >> tok) || tok != "orders" || !(is >> norders)) {
            throw ValidationError("basis cache: expected orders");
        }
        for (std::size_t m = 1; m <= norders; ++m) {
            std::size_t mm = 0;
            if (!(is >> tok) || tok != "coeff" || !(is >> mm) || mm != m) {
                throw ValidationError("basis cache: expected coeff row");
            }
            std::vector<std::uint64_t> row(factorial(static_cast<std::uint32_t>(m)));
            for (auto& c : row) {
                if (!(is >> c)) throw ValidationError("basis cache: truncated coeff row");
            }
            entry.coeffs.by_order.push_back(std::move(row));
        }
        b.entries.push_back(std::move(entry));
    }
    if (!(is >> tok) || tok != "det") throw ValidationError("basis cache: expected det");
    std::string det_str;
    if (!(is >> det_str)) throw ValidationError("basis cache: truncated det");
    b.det = BigInt::from_string(det_str);
    const std::size_t r = entry_count;
    b.scaled_inverse.assign(r, std::vector<BigInt>(r));
    for (std::size_t i = 0; i < r; ++i) {
        if (!(is >> tok) || tok != "inv") throw ValidationError("basis cache: expected inv row");
        for (std::size_t j = 0; j < r; ++j) {
            std::string cell;
            if (!(is >> cell)) throw ValidationError("basis cache: truncated inv row");
            b.scaled_inverse[i][j] = BigInt::from_string(cell);
        }
    }
    verify_basis(b);
    return b;
}

}  // namespace

std::string encode_basis_cache() {
    std::ostringstream payload;
    payload << "GPEBASIS " << kBasisCacheVersion << '\n';
    for (int k = 2; k <= 4; ++k) encode_one_basis(payload, shared_basis(k));
    payload << "end\n";
    return payload.str() + "checksum " + hex64(fnv1a64(payload.str())) + "\n";
}

bool decode_and_install_basis_cache(const std::string& blob) {
    const auto mark = blob.rfind("checksum ");
    if (mark == std::string::npos) return false;
    const std::string payload = blob.substr(0, mark);
    const std::string check = blob.substr(mark + 9);
    if (check.substr(0, 16) != hex64(fnv1a64(payload))) return false;

    try {
        std::istringstream is(payload);
        std::string magic;
        std::uint32_t version = 0;
        if (!(is >> magic >> version) || magic != "GPEBASIS" || version != kBasisCacheVersion) {
            return false;
        }
        std::string tok;
        while (is >> tok) {
            if (tok == "end") break;
            if (tok != "basis") return false;
            int order = 0;
            std::size_t entry_count = 0;
            if (!(is >> order >> entry_count)) return false;
            install_shared_basis(decode_one_basis(is, order, entry_count));
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool load_basis_cache_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_and_install_basis_cache(ss.str());
}

void save_basis_cache_file(const std::string& path) {
    const std::string blob = encode_basis_cache();
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return;
        out << blob;
        if (!out.good()) return;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
}

}  // namespace gpe
