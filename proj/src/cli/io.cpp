#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ringwalk/cli.hpp"
#include "ringwalk/errors.hpp"

namespace ringwalk::cli {

namespace fs = std::filesystem;

std::string format_double(double x) {
    // to_chars is locale-independent; %.17g semantics via the general format.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidConfig("cannot write '" + path.string() + "'");
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::string_view expected_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != expected_header)
        throw InvalidConfig("'" + path.string() + "': expected header '" + std::string(expected_header) + "'");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        rows.push_back(std::move(fields));
    }
    return rows;
}

double to_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidConfig("bad number in CSV: '" + s + "'");
    return v;
}

int to_int(const std::string& s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidConfig("bad integer in CSV: '" + s + "'");
    return v;
}

}  // namespace

void write_spectrum_csv(const fs::path& path, const SpectrumResult& result) {
    auto out = open_out(path);
    out << "k,branch,omega\n";
    const auto k = result.grid.axis_values();
    for (std::size_t i = 0; i < result.bands.size(); ++i)
        for (std::size_t b = 0; b < result.bands[i].size(); ++b)
            out << format_double(k[i]) << ',' << b << ',' << format_double(result.bands[i][b]) << '\n';
}

std::vector<SpectrumRow> read_spectrum_csv(const fs::path& path) {
    std::vector<SpectrumRow> rows;
    for (const auto& f : read_csv(path, "k,branch,omega")) {
        if (f.size() != 3) throw InvalidConfig("spectrum CSV row with " + std::to_string(f.size()) + " fields");
        rows.push_back({to_double(f[0]), to_int(f[1]), to_double(f[2])});
    }
    return rows;
}

void write_distribution_csv(const fs::path& path, const std::vector<std::array<double, 4>>& probability) {
    auto out = open_out(path);
    out << "site,comp,prob\n";
    for (std::size_t n = 0; n < probability.size(); ++n)
        for (int c = 0; c < 4; ++c) out << n << ',' << component_name(c) << ',' << format_double(probability[n][c]) << '\n';
}

std::vector<DistributionRow> read_distribution_csv(const fs::path& path) {
    std::vector<DistributionRow> rows;
    for (const auto& f : read_csv(path, "site,comp,prob")) {
        if (f.size() != 3 || f[1].size() != 1) throw InvalidConfig("malformed distribution CSV row");
        rows.push_back({to_int(f[0]), f[1][0], to_double(f[2])});
    }
    return rows;
}

void write_metadata(const fs::path& path, const Metadata& entries) {
    auto out = open_out(path);
    for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
}

void write_plot_script(const fs::path& script, const fs::path& csv, PlotKind kind, const std::string& title,
                       std::optional<char> component) {
    auto out = open_out(script);
    const std::string data = csv.filename().string();
    fs::path png = csv.filename();
    png.replace_extension(".png");
    out << "# gnuplot " << script.filename().string() << "  (run from this directory)\n"
        << "set datafile separator ','\n"
        << "set terminal pngcairo size 800,600\n"
        << "set output '" << png.string() << "'\n"
        << "set title '" << title << "'\n"
        << "set key off\n";
    switch (kind) {
        case PlotKind::spectrum:
            out << "set xlabel 'K'\nset ylabel 'omega'\nset xrange [-pi:pi]\nset yrange [-pi:pi]\n"
                << "plot '" << data << "' every ::1 using 1:3 with points pt 7 ps 0.3\n";
            break;
        case PlotKind::distribution:
            out << "set xlabel 'site'\nset ylabel 'probability'\n";
            if (component) {
                out << "plot '" << data << "' every ::1 using 1:(strcol(2) eq '" << *component
                    << "' ? $3 : NaN) with impulses lw 2\n";
            } else {
                out << "set key on\n"
                    << "plot '" << data << "' every ::1 using 1:(strcol(2) eq 'A' || strcol(2) eq 'B' ? $3 : NaN)"
                    << " smooth frequency with impulses lw 2 title 'A+B',\\\n"
                    << "     '" << data << "' every ::1 using 1:(strcol(2) eq 'C' || strcol(2) eq 'D' ? $3 : NaN)"
                    << " smooth frequency with impulses lw 2 title 'C+D'\n";
            }
            break;
        case PlotKind::sectors:
            out << "set key on\nset xlabel 'step'\nset ylabel 'occupation'\nset yrange [0:1]\n"
                << "plot '" << data << "' every ::1 using 1:2 with lines title 'A+B',\\\n"
                << "     '" << data << "' every ::1 using 1:3 with lines title 'C+D'\n";
            break;
        case PlotKind::ab_shift:
            out << "set xlabel 'K'\nset ylabel 'multiset distance'\nset logscale y\n"
                << "plot '" << data << "' every ::1 using 1:3 with linespoints\n";
            break;
    }
}

}  // namespace ringwalk::cli
