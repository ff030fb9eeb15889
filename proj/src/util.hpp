#ifndef CONCSE_UTIL_HPP
#define CONCSE_UTIL_HPP

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace concse {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy. The numeric code is shared with the C API status values
// and the CLI exit codes: 2 = config/usage, 3 = I/O, 4 = internal invariant.
class Error : public std::runtime_error {
  public:
    Error(int code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    int code() const { return code_; }

  private:
    int code_;
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& message) : Error(2, message) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& message) : Error(3, message) {}
};

class InternalError : public Error {
  public:
    explicit InternalError(const std::string& message) : Error(4, message) {}
};

#define CONCSE_CHECK(cond, message)                                   \
    do {                                                              \
        if (!(cond)) throw ::concse::InternalError(message);          \
    } while (0)

// ---- Randomness ----
// All randomness in the project flows through explicitly seeded mt19937_64
// engines so runs are reproducible across platforms.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of the engine output.
// std::uniform_real_distribution is implementation-defined; this is not.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

// Uniform index in [0, n). The modulo bias over a 64-bit draw is negligible
// for the dataset sizes this project handles.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

// Fisher-Yates permutation of 0..n-1, deterministic per seed.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

// ---- Strings ----
std::vector<std::string> split_ws(const std::string& text);
std::vector<std::string> split_char(const std::string& text, char sep);
std::string join(const std::vector<std::string>& tokens, const std::string& sep);
std::string trim(const std::string& text);
std::string ascii_lower(std::string text);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);

// ---- Files ----
std::string read_file(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit content hash, used for input digests in run manifests.
std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

// ---- key = value config text ----
// Lines of "key = value"; '#' starts a comment; blank lines ignored.
class KvConfig {
  public:
    static KvConfig parse(const std::string& text);
    static KvConfig load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace concse

#endif  // CONCSE_UTIL_HPP
