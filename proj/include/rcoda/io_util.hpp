#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rcoda {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Round-trip-exact decimal rendering of a double (shortest form would also
// work; fixed max_digits10 keeps report files byte-stable).
std::string format_double(double x);

// Splits one CSV line on commas; no quoting support (none of our files need it).
std::vector<std::string> split_csv_line(const std::string& line);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a, used to fingerprint geometry descriptors in cached tables.
std::uint64_t fnv1a_hash(const std::string& s);
std::string hash_hex(std::uint64_t h);

}  // namespace rcoda
