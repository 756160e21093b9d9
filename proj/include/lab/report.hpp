#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

// -------------------------------------------------------------------- config

struct ConfigError : std::runtime_error {
    int line = 0;
    ConfigError(int line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

/// One `[experiment.<name>]` block (or the leading global block, name empty).
struct ConfigSection {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, std::string>> entries;
    std::map<std::string, int> line_of;

    bool has(const std::string& key) const { return line_of.count(key) > 0; }
    std::string text(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    /// Comma list, or lo:hi:count for a log-spaced sweep.
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
    /// Throws ConfigError on the first key outside `allowed`.
    void require_keys(const std::vector<std::string>& allowed) const;
};

struct Config {
    ConfigSection global;
    std::vector<ConfigSection> experiments;
    std::string hash;  ///< FNV-1a 64 of the source text, hex
};

/// Plain-text key = value lines; `#` starts a comment; sections `[experiment.<name>]`.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

std::string fnv1a_hex(const std::string& bytes);

/// Parses "a,b,c" or "lo:hi:count" (log-spaced, endpoints included).
std::vector<double> parse_number_list(const std::string& text);

// -------------------------------------------------------------------- tables and plots

struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Comma separated, header row, `#` comment lines first; numbers at 17 significant digits.
std::string to_csv(const Table& t);

struct Series {
    std::string name;
    std::vector<double> x, y;
    std::vector<double> lo, hi;  ///< optional error bars (same size as y or empty)
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    bool logx = false, logy = false;
};

/// Self-contained SVG line plot with axes, ticks and a legend.
std::string svg_plot(const PlotSpec& spec, const std::vector<Series>& series);

void write_text(const std::string& path, const std::string& text);

/// Deterministic decimal rendering used by every emitter.
std::string format_number(double v);

}  // namespace lab
