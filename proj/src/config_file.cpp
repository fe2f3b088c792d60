#include "fragsel/config_file.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace fragsel {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::ConfigError, "config key '" + key + "' needs an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::ConfigError, "config key '" + key + "' needs a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw Error(ErrorKind::ConfigError, "config key '" + key + "' needs true/false, got '" + value + "'");
}

}  // namespace

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::ConfigError,
                        "config line " + std::to_string(line_no) + " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "n_ret") cfg.n_ret = parse_long(key, value);
        else if (key == "n_seg") cfg.n_seg = parse_long(key, value);
        else if (key == "k") cfg.k = parse_long(key, value);
        else if (key == "tau_fig") cfg.tau_fig = parse_double(key, value);
        else if (key == "tau_obj") cfg.tau_obj = parse_double(key, value);
        else if (key == "tau_sem") cfg.tau_sem = parse_double(key, value);
        else if (key == "tau_size") cfg.tau_size = parse_double(key, value);
        else if (key == "alpha") cfg.alpha = parse_double(key, value);
        else if (key == "temperature") cfg.temperature = parse_double(key, value);
        else if (key == "image_token_cost") cfg.image_token_cost = parse_long(key, value);
        else if (key == "parallelism") cfg.parallelism = parse_long(key, value);
        else if (key == "collect_trace_nodes") cfg.collect_trace_nodes = parse_bool(key, value);
        else throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace fragsel
