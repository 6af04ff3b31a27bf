#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "qunity/qunity.hpp"

namespace qtest {

inline qunity::Expanded expand_src(const std::string &src) {
    return qunity::expand(qunity::parse(src));
}

inline qunity::ExprPtr expr_of(const std::string &src) {
    auto r = expand_src(src);
    if (r.cat != qunity::Expanded::Cat::Expr)
        throw std::runtime_error("test term is not an expression: " + src);
    return r.expr;
}

inline qunity::ProgPtr prog_of(const std::string &src) {
    auto r = expand_src(src);
    if (r.cat != qunity::Expanded::Cat::Prog)
        throw std::runtime_error("test term is not a program: " + src);
    return r.prog;
}

inline qunity::TypePtr type_of_src(const std::string &src) {
    auto r = expand_src(src);
    if (r.cat != qunity::Expanded::Cat::Type)
        throw std::runtime_error("test term is not a type: " + src);
    return r.type;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string program_path(const std::string &name) {
    return std::string(QUNITY_SOURCE_DIR) + "/programs/" + name;
}

} // namespace qtest
