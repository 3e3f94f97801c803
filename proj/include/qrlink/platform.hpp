#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qrlink {

enum class Era { current, future };

std::string_view era_name(Era era);
std::optional<Era> parse_era(std::string_view text);

/// One hardware platform: link coupling efficiency, clock rate and memory
/// coherence time. Built-in sets exist for both eras; custom platforms can be
/// loaded from a config file.
struct PlatformParams {
    std::string name;
    double p_link = 0.0;      // zero-length link coupling efficiency, (0,1]
    double clock_mhz = 0.0;   // source/memory clock rate
    double tau_coh_ms = 0.0;  // memory coherence time
    Era era = Era::current;

    double tau_clock_ms() const { return 1e-3 / clock_mhz; }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class ProtocolKind {
    nsp_cell,
    nsp_two_segment,
    nrp_cell_ideal,
    nrp_cell_bm_write_in,
};

bool is_nsp(ProtocolKind kind);
std::string_view protocol_name(ProtocolKind kind);
std::optional<ProtocolKind> parse_protocol(std::string_view text);

/// Protocol selection plus the final memory Bell-measurement efficiency.
/// NSP variants wait for classical heralds, so both memories always dephase
/// for two extra attempt durations; NRP variants have no constant penalty.
struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::nsp_cell;
    double p_bm = 1.0;  // final memory BM efficiency, (0,1]

    int extra_dephasing_units() const { return is_nsp(kind) ? 2 : 0; }
    void validate() const;
};

struct ChannelParams {
    double l_att_km = 22.0;                  // fiber attenuation length
    double signal_speed_km_per_ms = 200.0;   // light in fiber, 2e5 km/s

    void validate() const;
};

/// Fully resolved per-evaluation bundle for one (platform, protocol,
/// distance) triple. All rate computations consume this.
struct LinkContext {
    double p = 0.0;           // half-link success probability per attempt
    double t0_ms = 0.0;       // attempt duration
    double tau_coh_ms = 0.0;
    double p_bm = 1.0;
    int extra_units = 0;

    static constexpr int n_modes = 2;  // two-mode-encoded photonic qubit

    double dephasing_ratio() const { return t0_ms / tau_coh_ms; }
};

/// The five built-in platforms of the given era, in table order
/// (NV, SiV, quantum dots, Calcium ions, Rubidium atoms).
std::vector<PlatformParams> builtin_platforms(Era era);

/// Config parse failure; `line` is 1-based.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct PlatformConfig {
    std::vector<PlatformParams> platforms;
    ChannelParams channel;  // defaults unless the file overrides them
};

/// Parses the flat key-value platform config format:
///   [platform] name=<text> p_link=<float> clock_mhz=<float> tcoh_ms=<float>
/// `#` begins a comment line; keys may be spread over several lines.
/// Top-level `l_att_km=` / `signal_speed_km_per_ms=` override the channel.
PlatformConfig parse_config(std::string_view text, Era era = Era::current);

/// List-of-platforms view of parse_config.
std::vector<PlatformParams> load_platforms(std::string_view text, Era era = Era::current);

/// Composes the half-link success probability and attempt duration for the
/// protocol at the given total distance. Pure function.
LinkContext resolve_context(const PlatformParams& platform, const ProtocolSpec& protocol,
                            const ChannelParams& channel, double distance_km);

}  // namespace qrlink
