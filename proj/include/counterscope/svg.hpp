#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "counterscope/config.hpp"
#include "counterscope/profile.hpp"

namespace counterscope {

struct SvgSeries {
	std::string label;
	HourlyProfile values{};
};

namespace svg_detail {

inline std::string num(double v) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.2f", v);
	return buf;
}

// Okabe-Ito-ish palette stretched to 12 entries; reused cyclically beyond.
inline const char* series_color(std::size_t i) {
	static constexpr const char* palette[12] = {
	    "#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9",
	    "#7f4fbf", "#a6761d", "#1b9e77", "#e7298a", "#66a61e", "#666666"};
	return palette[i % 12];
}

inline std::string xml_escape(const std::string& s) {
	std::string out;
	out.reserve(s.size());
	for (char c : s) {
		switch (c) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		default: out += c;
		}
	}
	return out;
}

} // namespace svg_detail

// A fixed-size line chart of hourly profiles (one polyline per series, one
// point per hour) with an optional dashed reference profile. Output depends
// only on the arguments, so rerenders are byte-identical.
inline void write_profile_svg(std::ostream& out, const std::vector<SvgSeries>& series,
                              const std::array<double, 24>* reference, const std::string& title,
                              const RunMeta& meta) {
	using svg_detail::num;
	const double width = 800.0, height = 480.0;
	const double left = 56.0, right = 648.0, top = 40.0, bottom = 444.0;
	const double plot_w = right - left, plot_h = bottom - top;

	double ymax = 0.0;
	for (const auto& s : series)
		for (double v : s.values)
			ymax = std::max(ymax, v);
	if (reference)
		for (double v : *reference)
			ymax = std::max(ymax, v);
	if (ymax <= 0.0)
		ymax = 1.0;
	ymax *= 1.05; // headroom so peaks stay off the frame

	auto x_of = [&](int h) { return left + plot_w * static_cast<double>(h) / 23.0; };
	auto y_of = [&](double v) { return bottom - plot_h * (v / ymax); };

	out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
	    << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
	out << "<desc>";
	bool first = true;
	for (const auto& line : meta.comment_lines()) {
		if (!first)
			out << "; ";
		out << svg_detail::xml_escape(line);
		first = false;
	}
	out << "</desc>\n";
	out << "<rect width=\"" << num(width) << "\" height=\"" << num(height)
	    << "\" fill=\"#ffffff\"/>\n";
	out << "<text x=\"" << num((left + right) / 2.0) << "\" y=\"24\" font-family=\"sans-serif\""
	    << " font-size=\"14\" text-anchor=\"middle\">" << svg_detail::xml_escape(title)
	    << "</text>\n";

	// horizontal gridlines with value labels
	for (int g = 0; g <= 4; ++g) {
		const double v = ymax * static_cast<double>(g) / 4.0;
		const double y = y_of(v);
		out << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(right)
		    << "\" y2=\"" << num(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
		out << "<text x=\"" << num(left - 6.0) << "\" y=\"" << num(y + 4.0)
		    << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << num(v)
		    << "</text>\n";
	}
	// hour ticks every 3 hours
	for (int h = 0; h < 24; h += 3) {
		const double x = x_of(h);
		out << "<line x1=\"" << num(x) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(x)
		    << "\" y2=\"" << num(bottom + 4.0) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
		out << "<text x=\"" << num(x) << "\" y=\"" << num(bottom + 18.0)
		    << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << h
		    << "</text>\n";
	}
	out << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(right)
	    << "\" y2=\"" << num(bottom) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
	out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
	    << "\" y2=\"" << num(bottom) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

	if (reference) {
		out << "<polyline fill=\"none\" stroke=\"#444444\" stroke-width=\"1.5\""
		    << " stroke-dasharray=\"6 4\" points=\"";
		for (int h = 0; h < 24; ++h)
			out << (h ? " " : "") << num(x_of(h)) << "," << num(y_of((*reference)[h]));
		out << "\"/>\n";
	}
	for (std::size_t i = 0; i < series.size(); ++i) {
		out << "<polyline fill=\"none\" stroke=\"" << svg_detail::series_color(i)
		    << "\" stroke-width=\"1.5\" points=\"";
		for (int h = 0; h < 24; ++h)
			out << (h ? " " : "") << num(x_of(h)) << "," << num(y_of(series[i].values[h]));
		out << "\"/>\n";
	}

	// legend column on the right edge
	double ly = top + 6.0;
	for (std::size_t i = 0; i < series.size(); ++i, ly += 16.0) {
		out << "<line x1=\"" << num(right + 10.0) << "\" y1=\"" << num(ly - 4.0) << "\" x2=\""
		    << num(right + 30.0) << "\" y2=\"" << num(ly - 4.0) << "\" stroke=\""
		    << svg_detail::series_color(i) << "\" stroke-width=\"2\"/>\n";
		out << "<text x=\"" << num(right + 34.0) << "\" y=\"" << num(ly)
		    << "\" font-family=\"sans-serif\" font-size=\"11\">" << svg_detail::xml_escape(series[i].label)
		    << "</text>\n";
	}
	if (reference) {
		out << "<line x1=\"" << num(right + 10.0) << "\" y1=\"" << num(ly - 4.0) << "\" x2=\""
		    << num(right + 30.0) << "\" y2=\"" << num(ly - 4.0)
		    << "\" stroke=\"#444444\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
		out << "<text x=\"" << num(right + 34.0) << "\" y=\"" << num(ly)
		    << "\" font-family=\"sans-serif\" font-size=\"11\">baseline</text>\n";
	}
	out << "</svg>\n";
}

} // namespace counterscope
