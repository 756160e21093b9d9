#include "lab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace lab {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    return true;
}

double to_double(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "key '" + key + "': expected a number, got '" + v + "'");
    }
}

}  // namespace

std::string ConfigSection::text(const std::string& key, const std::string& fallback) const {
    for (auto& [k, v] : entries)
        if (k == key) return v;
    return fallback;
}

double ConfigSection::number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return to_double(text(key, ""), line_of.at(key), key);
}

long ConfigSection::integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    double x = number(key, 0);
    if (x != std::floor(x)) throw ConfigError(line_of.at(key), "key '" + key + "': expected an integer");
    return static_cast<long>(x);
}

bool ConfigSection::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    auto v = text(key, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(line_of.at(key), "key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> ConfigSection::numbers(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    try {
        return parse_number_list(text(key, ""));
    } catch (const std::exception& e) {
        throw ConfigError(line_of.at(key), "key '" + key + "': " + e.what());
    }
}

void ConfigSection::require_keys(const std::vector<std::string>& allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto& [k, v] : entries)
        if (!ok.count(k)) {
            std::string where = name.empty() ? "global section" : "experiment '" + name + "'";
            throw ConfigError(line_of.at(k), "unknown key '" + k + "' in " + where);
        }
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    auto t = trim(text);
    if (t.empty()) return out;
    auto conv = [](const std::string& s) {
        std::size_t used = 0;
        auto u = trim(s);
        double x = std::stod(u, &used);
        if (used != u.size()) throw std::invalid_argument("bad number '" + u + "'");
        return x;
    };
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(t);
        std::string p;
        while (std::getline(ss, p, ':')) parts.push_back(p);
        if (parts.size() != 3) throw std::invalid_argument("expected lo:hi:count");
        double lo = conv(parts[0]), hi = conv(parts[1]);
        double n = conv(parts[2]);
        if (!(lo > 0 && hi > lo) || n < 2 || n != std::floor(n))
            throw std::invalid_argument("log sweep needs 0 < lo < hi and an integer count >= 2");
        int k = static_cast<int>(n);
        for (int i = 0; i < k; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (k - 1)));
        return out;
    }
    std::stringstream ss(t);
    std::string p;
    while (std::getline(ss, p, ',')) out.push_back(conv(p));
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Config parse_config(const std::string& text) {
    Config cfg;
    cfg.hash = fnv1a_hex(text);
    ConfigSection* cur = &cfg.global;
    std::set<std::string> names;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        auto s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "unterminated section header");
            auto inner = trim(s.substr(1, s.size() - 2));
            const std::string pre = "experiment.";
            if (inner.rfind(pre, 0) != 0) throw ConfigError(line, "sections must be [experiment.<name>]");
            auto name = inner.substr(pre.size());
            if (!valid_name(name)) throw ConfigError(line, "invalid experiment name '" + name + "'");
            if (!names.insert(name).second) throw ConfigError(line, "duplicate experiment '" + name + "'");
            cfg.experiments.push_back({});
            cur = &cfg.experiments.back();
            cur->name = name;
            cur->line = line;
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
        auto key = trim(s.substr(0, eq));
        auto val = trim(s.substr(eq + 1));
        if (!valid_name(key)) throw ConfigError(line, "invalid key '" + key + "'");
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
        if (cur->line_of.count(key)) throw ConfigError(line, "duplicate key '" + key + "'");
        cur->line_of[key] = line;
        cur->entries.emplace_back(key, val);
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError(0, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (auto& c : t.comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

// -------------------------------------------------------------------- svg

namespace {

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

std::string fmt(double v, int prec = 4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

std::vector<double> ticks(double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
        for (double e = std::floor(lo); e <= std::ceil(hi) + 1e-9; e += 1)
            if (e >= lo - 1e-9 && e <= hi + 1e-9) t.push_back(e);
        if (t.size() < 2) t = {lo, hi};
        return t;
    }
    double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / 4)));
    if (span / step > 10) step *= 2.5;
    if (span / step > 10) step *= 2;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) t.push_back(v);
    return t;
}

}  // namespace

std::string svg_plot(const PlotSpec& spec, const std::vector<Series>& series) {
    const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
    auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!spec.logx || x > 0) && (!spec.logy || y > 0);
    };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            double lo = s.y[i], hi = s.y[i];
            if (i < s.lo.size() && usable(s.x[i], s.lo[i])) lo = std::min(lo, s.lo[i]);
            if (i < s.hi.size() && usable(s.x[i], s.hi[i])) hi = std::max(hi, s.hi[i]);
            y0 = std::min(y0, ty(lo));
            y1 = std::max(y1, ty(hi));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    double padx = 0.04 * (x1 - x0), pady = 0.06 * (y1 - y0);
    x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
    auto px = [&](double v) { return L + (W - L - R) * (v - x0) / (x1 - x0); };
    auto py = [&](double v) { return H - B - (H - T - B) * (v - y0) / (y1 - y0); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(spec.title)
      << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(x0, x1, spec.logx)) {
        o << "<line x1=\"" << fmt(px(t), 6) << "\" y1=\"" << H - B << "\" x2=\"" << fmt(px(t), 6) << "\" y2=\""
          << H - B + 5 << "\" stroke=\"black\"/>";
        o << "<text x=\"" << fmt(px(t), 6) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
          << (spec.logx ? "1e" + fmt(t, 3) : fmt(t)) << "</text>\n";
    }
    for (double t : ticks(y0, y1, spec.logy)) {
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(py(t), 6) << "\" x2=\"" << L << "\" y2=\""
          << fmt(py(t), 6) << "\" stroke=\"black\"/>";
        o << "<text x=\"" << L - 8 << "\" y=\"" << fmt(py(t) + 4, 6) << "\" text-anchor=\"end\">"
          << (spec.logy ? "1e" + fmt(t, 3) : fmt(t)) << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << esc(spec.xlabel)
      << "</text>\n";
    o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << esc(spec.ylabel) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        auto& s = series[k];
        const char* col = colors[k % 6];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            pts += fmt(px(tx(s.x[i])), 6) + "," + fmt(py(ty(s.y[i])), 6) + " ";
            if (i < s.lo.size() && i < s.hi.size() && usable(s.x[i], s.lo[i]) && usable(s.x[i], s.hi[i]))
                o << "<line x1=\"" << fmt(px(tx(s.x[i])), 6) << "\" y1=\"" << fmt(py(ty(s.lo[i])), 6) << "\" x2=\""
                  << fmt(px(tx(s.x[i])), 6) << "\" y2=\"" << fmt(py(ty(s.hi[i])), 6) << "\" stroke=\"" << col
                  << "\" stroke-opacity=\"0.5\"/>\n";
            o << "<circle cx=\"" << fmt(px(tx(s.x[i])), 6) << "\" cy=\"" << fmt(py(ty(s.y[i])), 6)
              << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
        }
        if (!pts.empty())
            o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        double ly = T + 14 + 16 * k;
        o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly - 4
          << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>";
        o << "<text x=\"" << W - R + 35 << "\" y=\"" << ly << "\">" << esc(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace lab
