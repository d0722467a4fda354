#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gbcorr/correlation.hpp"
#include "gbcorr/estimates.hpp"
#include "gbcorr/fit.hpp"

namespace gbcorr {

using Json = nlohmann::ordered_json;

// 17 significant digits, shortest exponent form; nan/inf spelled out
std::string format_double(double x);
// RFC 4180 field quoting
std::string csv_field(const std::string& s);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    CsvTable& row(const std::vector<std::string>& cells);
    std::string str() const;  // CRLF line ends

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string orbit_csv(const CorrelationReport& r);
Json to_json(const CorrelationReport& r);
Json to_json(const AsymptoticFit& f);
Json to_json(const BoundCheck& b);
std::string bound_csv(const std::vector<BoundCheck>& rows);

// summary table of per-k_F reports
std::string summary_csv(const std::vector<CorrelationReport>& reps);
// columns of a CSV with a header, by name; ValidationError if absent
std::vector<double> read_csv_column(const std::string& text, const std::string& column);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    bool markers = true;
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    bool log_x = false, log_y = false;
    std::vector<PlotSeries> series;
    // optional lower panel
    std::vector<PlotSeries> residuals;
};

std::string svg_plot(const PlotSpec& spec);

// data, fitted curve and residual panel
std::string svg_fit_plot(const AsymptoticFit& f, const std::string& title, const std::string& ylabel);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace gbcorr
