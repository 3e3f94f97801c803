#include "qrlink/platform.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace qrlink {

std::string_view era_name(Era era) {
    return era == Era::current ? "current" : "future";
}

std::optional<Era> parse_era(std::string_view text) {
    if (text == "current") return Era::current;
    if (text == "future") return Era::future;
    return std::nullopt;
}

void PlatformParams::validate() const {
    if (name.empty())
        throw std::invalid_argument("platform field 'name' must be non-empty");
    if (!(p_link > 0.0) || p_link > 1.0)
        throw std::invalid_argument("platform '" + name + "': field 'p_link' must lie in (0, 1], got " +
                                    std::to_string(p_link));
    if (!(clock_mhz > 0.0))
        throw std::invalid_argument("platform '" + name + "': field 'clock_mhz' must be positive");
    if (!(tau_coh_ms > 0.0))
        throw std::invalid_argument("platform '" + name + "': field 'tcoh_ms' must be positive");
}

bool is_nsp(ProtocolKind kind) {
    return kind == ProtocolKind::nsp_cell || kind == ProtocolKind::nsp_two_segment;
}

std::string_view protocol_name(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::nsp_cell: return "nsp-cell";
        case ProtocolKind::nsp_two_segment: return "nsp-two-segment";
        case ProtocolKind::nrp_cell_ideal: return "nrp-cell";
        case ProtocolKind::nrp_cell_bm_write_in: return "nrp-cell-bm";
    }
    return "unknown";
}

std::optional<ProtocolKind> parse_protocol(std::string_view text) {
    for (ProtocolKind kind : {ProtocolKind::nsp_cell, ProtocolKind::nsp_two_segment,
                              ProtocolKind::nrp_cell_ideal, ProtocolKind::nrp_cell_bm_write_in}) {
        if (text == protocol_name(kind)) return kind;
    }
    return std::nullopt;
}

void ProtocolSpec::validate() const {
    if (!(p_bm > 0.0) || p_bm > 1.0)
        throw std::invalid_argument("protocol field 'p_bm' must lie in (0, 1]");
}

void ChannelParams::validate() const {
    if (!(l_att_km > 0.0))
        throw std::invalid_argument("channel field 'l_att_km' must be positive");
    if (!(signal_speed_km_per_ms > 0.0))
        throw std::invalid_argument("channel field 'signal_speed_km_per_ms' must be positive");
}

std::vector<PlatformParams> builtin_platforms(Era era) {
    if (era == Era::current) {
        return {
            {"nv", 0.05, 50.0, 10.0, Era::current},
            {"siv", 0.05, 30.0, 1.0, Era::current},
            {"quantum-dots", 0.10, 1000.0, 0.003, Era::current},
            {"calcium-ions", 0.004, 0.06, 0.8, Era::current},
            {"rubidium-atoms", 0.70, 5.0, 100.0, Era::current},
        };
    }
    return {
        {"nv", 0.50, 250.0, 10000.0, Era::future},
        {"siv", 0.50, 500.0, 100.0, Era::future},
        {"quantum-dots", 0.60, 1000.0, 0.3, Era::future},
        {"calcium-ions", 0.10, 1.0, 1.0, Era::future},
        {"rubidium-atoms", 0.70, 100.0, 1000.0, Era::future},
    };
}

namespace {

struct Token {
    std::string text;
    int line;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    int line = 1;
    std::string current;
    int current_line = 1;
    bool in_comment = false;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back({current, current_line});
            current.clear();
        }
    };
    for (char c : text) {
        if (c == '\n') {
            flush();
            ++line;
            in_comment = false;
            continue;
        }
        if (in_comment) continue;
        if (c == '#') {
            flush();
            in_comment = true;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (current.empty()) current_line = line;
        current.push_back(c);
    }
    flush();

    // Whitespace around '=' is allowed: re-join "key", "=", "value" splits.
    std::vector<Token> joined;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        Token token = tokens[i];
        const bool dangling = !token.text.empty() && token.text.back() == '=';
        const bool lone = token.text == "=";
        if (!joined.empty() && (lone || token.text.front() == '=') &&
            joined.back().text.find('=') == std::string::npos) {
            joined.back().text += token.text;
            if ((lone || dangling) && i + 1 < tokens.size()) joined.back().text += tokens[++i].text;
            continue;
        }
        if (dangling && i + 1 < tokens.size()) token.text += tokens[++i].text;
        joined.push_back(token);
    }
    return joined;
}

double parse_double(const Token& token, const std::string& key) {
    const std::string& s = token.text;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(token.line, "value of '" + key + "' is not a number: '" + s + "'");
    return value;
}

}  // namespace

PlatformConfig parse_config(std::string_view text, Era era) {
    PlatformConfig config;
    std::optional<PlatformParams> current;
    // Tracks which keys a block has seen so a missing one can be reported.
    bool has_p_link = false, has_clock = false, has_tcoh = false;
    int block_line = 0;

    auto finish_block = [&] {
        if (!current) return;
        if (current->name.empty()) throw ConfigError(block_line, "platform block missing 'name'");
        if (!has_p_link) throw ConfigError(block_line, "platform '" + current->name + "' missing 'p_link'");
        if (!has_clock) throw ConfigError(block_line, "platform '" + current->name + "' missing 'clock_mhz'");
        if (!has_tcoh) throw ConfigError(block_line, "platform '" + current->name + "' missing 'tcoh_ms'");
        try {
            current->validate();
        } catch (const std::invalid_argument& err) {
            throw ConfigError(block_line, err.what());
        }
        config.platforms.push_back(*current);
        current.reset();
    };

    for (const Token& token : tokenize(text)) {
        if (token.text == "[platform]") {
            finish_block();
            current = PlatformParams{};
            current->era = era;
            has_p_link = has_clock = has_tcoh = false;
            block_line = token.line;
            continue;
        }
        auto eq = token.text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(token.line, "expected key=value, got '" + token.text + "'");
        std::string key = token.text.substr(0, eq);
        Token value{token.text.substr(eq + 1), token.line};
        if (value.text.empty())
            throw ConfigError(token.line, "empty value for '" + key + "'");

        if (!current) {
            if (key == "l_att_km") {
                config.channel.l_att_km = parse_double(value, key);
            } else if (key == "signal_speed_km_per_ms") {
                config.channel.signal_speed_km_per_ms = parse_double(value, key);
            } else {
                throw ConfigError(token.line, "key '" + key + "' outside a [platform] block");
            }
            continue;
        }
        if (key == "name") {
            current->name = value.text;
        } else if (key == "p_link") {
            current->p_link = parse_double(value, key);
            has_p_link = true;
        } else if (key == "clock_mhz") {
            current->clock_mhz = parse_double(value, key);
            has_clock = true;
        } else if (key == "tcoh_ms") {
            current->tau_coh_ms = parse_double(value, key);
            has_tcoh = true;
        } else {
            throw ConfigError(token.line, "unknown platform key '" + key + "'");
        }
    }
    finish_block();
    try {
        config.channel.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(0, err.what());
    }
    return config;
}

std::vector<PlatformParams> load_platforms(std::string_view text, Era era) {
    return parse_config(text, era).platforms;
}

LinkContext resolve_context(const PlatformParams& platform, const ProtocolSpec& protocol,
                            const ChannelParams& channel, double distance_km) {
    platform.validate();
    protocol.validate();
    channel.validate();
    if (!(distance_km >= 0.0))
        throw std::invalid_argument("distance_km must be non-negative");

    const double half_transmission = std::exp(-(distance_km / 2.0) / channel.l_att_km);
    const double tau_clock = platform.tau_clock_ms();

    LinkContext ctx;
    ctx.tau_coh_ms = platform.tau_coh_ms;
    ctx.p_bm = protocol.p_bm;
    ctx.extra_units = protocol.extra_dephasing_units();

    switch (protocol.kind) {
        case ProtocolKind::nsp_cell:
            // Heralding signal travels detector -> central node, so one
            // attempt spans the full cell; never faster than the source clock.
            ctx.p = platform.p_link * half_transmission;
            ctx.t0_ms = std::max(distance_km / channel.signal_speed_km_per_ms, tau_clock);
            break;
        case ProtocolKind::nsp_two_segment:
            // Both end-point sources must fire and both photons be detected
            // at the photonic node; 1/2 from the linear-optics BM.
            ctx.p = 0.5 * platform.p_link * platform.p_link * half_transmission;
            ctx.t0_ms = std::max(distance_km / (2.0 * channel.signal_speed_km_per_ms), tau_clock);
            break;
        case ProtocolKind::nrp_cell_ideal:
            // Unit write-in efficiency; attempts are paced by the source clock.
            ctx.p = platform.p_link * half_transmission;
            ctx.t0_ms = tau_clock;
            break;
        case ProtocolKind::nrp_cell_bm_write_in:
            // Teleportation-assisted write-in: P_write = P_source*eta_det^2/2
            // with the table value taken as the composite P_source*eta_det.
            ctx.p = 0.5 * platform.p_link * platform.p_link * half_transmission;
            ctx.t0_ms = tau_clock;
            break;
    }
    return ctx;
}

}  // namespace qrlink
