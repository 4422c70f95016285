// serialize.hpp — JSON records for profiles and entropies, and the
// versioned basis cache file used by the CLI.
#pragma once

#include <iosfwd>
#include <string>

#include "gpe/cornertree.hpp"
#include "gpe/entropy.hpp"
#include "gpe/patterns.hpp"

namespace gpe {

// {"order":k,"n":n,"counts":{"<one-line>":"<decimal>",...},"method":...}
// Counts are decimal strings: they routinely exceed 64 bits.
std::string profile_to_json(const Profile& p);
void write_profile_csv(std::ostream& out, const Profile& p);

// {"kind","order","delay","raw_nats","normalized","sample_size","method"}
std::string entropy_to_json(const EntropyValue& ev);

inline constexpr std::uint32_t kBasisCacheVersion = 1;

// Cache blob for the order 2..4 recovery bases: magic, format version and
// an FNV-1a checksum over the payload. Any mismatch is a silent miss.
std::string encode_basis_cache();
bool decode_and_install_basis_cache(const std::string& blob);

bool load_basis_cache_file(const std::string& path);  // false = regenerate
void save_basis_cache_file(const std::string& path);  // best effort

}  // namespace gpe
