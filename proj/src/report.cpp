#include "gbcorr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gbcorr/errors.hpp"

namespace gbcorr {

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(const std::vector<std::string>& cells)
{
    if (cells.size() != header_.size()) throw ValidationError("csv row width does not match the header");
    rows_.push_back(cells);
    return *this;
}

std::string CsvTable::str() const
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i]);
        }
        out += "\r\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::string orbit_csv(const CorrelationReport& r)
{
    CsvTable t({"kx", "ky", "kz", "multiplicity", "lune_size", "bos_term", "ex_term", "trace_term"});
    for (const auto& o : r.per_orbit)
        t.row({std::to_string(o.k.x), std::to_string(o.k.y), std::to_string(o.k.z), std::to_string(o.multiplicity),
               std::to_string(o.lune_size), format_double(o.bos_term), format_double(o.ex_term),
               format_double(o.trace_term)});
    return t.str();
}

namespace {

Json num(double x)
{
    if (std::isfinite(x)) return x;
    return format_double(x);
}

}  // namespace

Json to_json(const CorrelationReport& r)
{
    Json j;
    j["k_F"] = r.k_F;
    j["beta"] = r.beta;
    j["model"] = r.model;
    j["K_max_bos"] = r.K_max_bos;
    j["K_max_ex"] = r.K_max_ex;
    j["e_bos_quadrature"] = num(r.e_bos_quadrature);
    j["e_bos_trace"] = num(r.e_bos_trace);
    j["e_ex"] = num(r.e_ex);
    j["e_second_order"] = num(r.e_second_order);
    j["e_b6"] = num(r.e_b6);
    j["tail_estimate_bos"] = num(r.tail_estimate_bos);
    j["tail_estimate_ex"] = num(r.tail_estimate_ex);
    j["quad_error"] = num(r.quad_error);
    j["beta_in_theorem_range"] = r.beta_in_theorem_range;
    Json rows = Json::array();
    for (const auto& o : r.per_orbit) {
        Json x;
        x["k"] = {o.k.x, o.k.y, o.k.z};
        x["multiplicity"] = o.multiplicity;
        x["lune_size"] = o.lune_size;
        x["bos_term"] = num(o.bos_term);
        x["ex_term"] = num(o.ex_term);
        x["trace_term"] = num(o.trace_term);
        rows.push_back(std::move(x));
    }
    j["per_orbit"] = std::move(rows);
    return j;
}

Json to_json(const AsymptoticFit& f)
{
    Json j;
    j["model"] = to_string(f.model);
    j["coefficients"] = Json::array();
    for (double c : f.coefficients) j["coefficients"].push_back(num(c));
    j["x"] = f.x;
    j["y"] = f.y;
    j["residuals"] = Json::array();
    for (double c : f.residuals) j["residuals"].push_back(num(c));
    j["r_squared"] = num(f.r_squared);
    j["last_relative_residual"] = num(f.last_relative_residual());
    return j;
}

Json to_json(const BoundCheck& b)
{
    Json j;
    j["name"] = b.name;
    j["k_F"] = b.k_F;
    j["beta"] = b.beta;
    j["epsilon"] = b.epsilon;
    j["lhs"] = num(b.lhs);
    j["rhs_envelope"] = num(b.rhs_envelope);
    j["ratio"] = num(b.ratio);
    j["pass"] = b.pass;
    j["context"] = b.context;
    return j;
}

std::string bound_csv(const std::vector<BoundCheck>& rows)
{
    CsvTable t({"name", "k_F", "beta", "epsilon", "lhs", "rhs_envelope", "ratio", "pass", "context"});
    for (const auto& b : rows)
        t.row({b.name, format_double(b.k_F), format_double(b.beta), format_double(b.epsilon), format_double(b.lhs),
               format_double(b.rhs_envelope), format_double(b.ratio), b.pass ? "true" : "false", b.context});
    return t.str();
}

std::string summary_csv(const std::vector<CorrelationReport>& reps)
{
    CsvTable t({"k_F", "beta", "model", "K_max_bos", "K_max_ex", "e_bos_quadrature", "e_bos_trace", "e_ex",
                "e_second_order", "e_b6", "tail_estimate_bos", "tail_estimate_ex"});
    for (const auto& r : reps)
        t.row({format_double(r.k_F), format_double(r.beta), r.model, format_double(r.K_max_bos),
               format_double(r.K_max_ex), format_double(r.e_bos_quadrature), format_double(r.e_bos_trace),
               format_double(r.e_ex), format_double(r.e_second_order), format_double(r.e_b6),
               format_double(r.tail_estimate_bos), format_double(r.tail_estimate_ex)});
    return t.str();
}

namespace {

// RFC 4180 records; quoted fields may hold separators and line breaks
std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<double> read_csv_column(const std::string& text, const std::string& column)
{
    const auto rows = parse_csv(text);
    if (rows.empty()) throw ValidationError("csv input is empty");
    const auto& h = rows.front();
    const auto it = std::find(h.begin(), h.end(), column);
    if (it == h.end()) throw ValidationError("csv input has no column '" + column + "'");
    const auto c = static_cast<std::size_t>(it - h.begin());
    std::vector<double> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (c >= rows[i].size()) throw ValidationError("csv row " + std::to_string(i) + " is short");
        try {
            std::size_t used = 0;
            const double v = std::stod(rows[i][c], &used);
            if (used != rows[i][c].size()) throw std::invalid_argument("trailing");
            out.push_back(v);
        } catch (const std::exception&) {
            throw ValidationError("csv column '" + column + "' row " + std::to_string(i) + ": not a number");
        }
    }
    return out;
}

// ---------------------------------------------------------------- svg

namespace {

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fx(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape_xml(const std::string& s)
{
    std::string o;
    for (char c : s) {
        switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        case '"': o += "&quot;"; break;
        default: o += c;
        }
    }
    return o;
}

struct Axis {
    double lo = 0, hi = 1;
    bool log = false;
    double map(double v, double p0, double p1) const
    {
        const double a = log ? std::log10(lo) : lo, b = log ? std::log10(hi) : hi;
        const double t = ((log ? std::log10(v) : v) - a) / (b - a);
        return p0 + t * (p1 - p0);
    }
};

Axis make_axis(const std::vector<PlotSeries>& ss, bool x, bool log)
{
    Axis a;
    a.log = log;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : ss)
        for (double v : x ? s.x : s.y) {
            if (!std::isfinite(v) || (log && !(v > 0))) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!std::isfinite(lo)) lo = log ? 1 : 0, hi = log ? 10 : 1;
    if (hi == lo) {
        const double d = log ? 2.0 : (lo == 0 ? 1.0 : std::abs(lo) * 0.1);
        lo = log ? lo / d : lo - d;
        hi = log ? hi * d : hi + d;
    } else if (!log) {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

void panel(std::ostringstream& o, const std::vector<PlotSeries>& ss, bool logx, bool logy, double x0, double y0,
           double w, double h, const std::string& ylabel, const std::string& xlabel, bool legend)
{
    const Axis ax = make_axis(ss, true, logx), ay = make_axis(ss, false, logy);
    o << "<rect x=\"" << fx(x0) << "\" y=\"" << fx(y0) << "\" width=\"" << fx(w) << "\" height=\"" << fx(h)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double t = i / 4.0;
        const double vx = ax.log ? std::pow(10, std::log10(ax.lo) + t * (std::log10(ax.hi) - std::log10(ax.lo)))
                                 : ax.lo + t * (ax.hi - ax.lo);
        const double vy = ay.log ? std::pow(10, std::log10(ay.lo) + t * (std::log10(ay.hi) - std::log10(ay.lo)))
                                 : ay.lo + t * (ay.hi - ay.lo);
        const double px = x0 + t * w, py = y0 + h - t * h;
        o << "<line x1=\"" << fx(px) << "\" y1=\"" << fx(y0 + h) << "\" x2=\"" << fx(px) << "\" y2=\"" << fx(y0 + h + 5)
          << "\" stroke=\"#333\"/>\n";
        o << "<text x=\"" << fx(px) << "\" y=\"" << fx(y0 + h + 18) << "\" font-size=\"11\" text-anchor=\"middle\">"
          << tick_label(vx) << "</text>\n";
        o << "<line x1=\"" << fx(x0 - 5) << "\" y1=\"" << fx(py) << "\" x2=\"" << fx(x0) << "\" y2=\"" << fx(py)
          << "\" stroke=\"#333\"/>\n";
        o << "<text x=\"" << fx(x0 - 8) << "\" y=\"" << fx(py + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
          << tick_label(vy) << "</text>\n";
    }
    if (!xlabel.empty())
        o << "<text x=\"" << fx(x0 + w / 2) << "\" y=\"" << fx(y0 + h + 36)
          << "\" font-size=\"12\" text-anchor=\"middle\">" << escape_xml(xlabel) << "</text>\n";
    o << "<text transform=\"translate(" << fx(x0 - 62) << "," << fx(y0 + h / 2)
      << ") rotate(-90)\" font-size=\"12\" text-anchor=\"middle\">" << escape_xml(ylabel) << "</text>\n";
    for (std::size_t s = 0; s < ss.size(); ++s) {
        const auto& se = ss[s];
        const char* col = palette[s % 6];
        std::string pts;
        for (std::size_t i = 0; i < se.x.size(); ++i) {
            if (!std::isfinite(se.y[i]) || (logy && !(se.y[i] > 0)) || (logx && !(se.x[i] > 0))) continue;
            pts += fx(ax.map(se.x[i], x0, x0 + w)) + "," + fx(ay.map(se.y[i], y0 + h, y0)) + " ";
        }
        if (!pts.empty()) pts.pop_back();
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        if (se.markers)
            for (std::size_t i = 0; i < se.x.size(); ++i) {
                if (!std::isfinite(se.y[i]) || (logy && !(se.y[i] > 0)) || (logx && !(se.x[i] > 0))) continue;
                o << "<circle cx=\"" << fx(ax.map(se.x[i], x0, x0 + w)) << "\" cy=\""
                  << fx(ay.map(se.y[i], y0 + h, y0)) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
            }
        if (legend) {
            const double ly = y0 + 16 + 16.0 * static_cast<double>(s);
            o << "<line x1=\"" << fx(x0 + w - 150) << "\" y1=\"" << fx(ly - 4) << "\" x2=\"" << fx(x0 + w - 130)
              << "\" y2=\"" << fx(ly - 4) << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
            o << "<text x=\"" << fx(x0 + w - 125) << "\" y=\"" << fx(ly) << "\" font-size=\"11\">"
              << escape_xml(se.label) << "</text>\n";
        }
    }
}

}  // namespace

std::string svg_plot(const PlotSpec& spec)
{
    const double W = 720, top = 40, left = 90, pw = 600, ph = 300, rh = 140;
    const bool has_res = !spec.residuals.empty();
    const double H = top + ph + 50 + (has_res ? rh + 60 : 0);
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fx(W) << "\" height=\"" << fx(H)
      << "\" font-family=\"sans-serif\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fx(W / 2) << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" << escape_xml(spec.title)
      << "</text>\n";
    panel(o, spec.series, spec.log_x, spec.log_y, left, top, pw, ph, spec.ylabel, has_res ? "" : spec.xlabel, true);
    if (has_res)
        panel(o, spec.residuals, spec.log_x, false, left, top + ph + 40, pw, rh, "residual", spec.xlabel, false);
    o << "</svg>\n";
    return o.str();
}

std::string svg_fit_plot(const AsymptoticFit& f, const std::string& title, const std::string& ylabel)
{
    PlotSpec p;
    p.title = title + " (" + to_string(f.model) + ")";
    p.xlabel = "k_F";
    p.ylabel = ylabel;
    p.series.push_back({"data", f.x, f.y, true});
    PlotSeries curve{"fit", {}, {}, false};
    if (!f.x.empty()) {
        const double lo = *std::min_element(f.x.begin(), f.x.end());
        const double hi = *std::max_element(f.x.begin(), f.x.end());
        for (int i = 0; i <= 64; ++i) {
            const double t = lo + (hi - lo) * i / 64.0;
            curve.x.push_back(t);
            curve.y.push_back(f.predict(t));
        }
    }
    p.series.push_back(std::move(curve));
    p.residuals.push_back({"residual", f.x, f.residuals, true});
    return svg_plot(p);
}

void write_text_file(const std::string& path, const std::string& text)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace gbcorr
