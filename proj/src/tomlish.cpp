#include "fedprune/tomlish.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>

#include "fedprune/errors.hpp"

namespace fedprune {

namespace {

class Cursor {
public:
    explicit Cursor(const std::string& text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char take() {
        char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }
    std::size_t line() const { return line_; }

    [[noreturn]] void fail(const std::string& message) const {
        throw FormatError("spec line " + std::to_string(line_) + ": " + message);
    }

    // Whitespace and # comments; newlines skipped only when requested.
    void skip_trivia(bool across_lines) {
        while (!done()) {
            char c = peek();
            if (c == '#') {
                while (!done() && peek() != '\n') take();
            } else if (c == ' ' || c == '\t' || c == '\r') {
                take();
            } else if (c == '\n' && across_lines) {
                take();
            } else {
                break;
            }
        }
    }

    std::string bare_token() {
        std::string out;
        while (!done()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
                c == '+') {
                out.push_back(take());
            } else {
                break;
            }
        }
        return out;
    }

    std::string quoted_string() {
        take();  // opening quote
        std::string out;
        while (true) {
            if (done()) fail("unterminated string");
            char c = take();
            if (c == '"') break;
            if (c == '\n') fail("newline inside string");
            if (c == '\\') {
                if (done()) fail("dangling escape");
                char e = take();
                switch (e) {
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

nlohmann::json parse_scalar(Cursor& cur, const std::string& token) {
    if (token.empty()) cur.fail("expected a value");
    if (token == "true") return true;
    if (token == "false") return false;
    // integer first, float as fallback
    {
        long long v = 0;
        auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec == std::errc() && p == token.data() + token.size()) return v;
    }
    {
        char* end = nullptr;
        double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() + token.size() && !token.empty()) return v;
    }
    cur.fail("cannot parse value '" + token + "'");
}

nlohmann::json parse_value(Cursor& cur) {
    cur.skip_trivia(false);
    if (cur.done()) cur.fail("expected a value");
    char c = cur.peek();
    if (c == '"') return cur.quoted_string();
    if (c == '[') {
        cur.take();
        nlohmann::json arr = nlohmann::json::array();
        while (true) {
            cur.skip_trivia(true);
            if (cur.done()) cur.fail("unterminated array");
            if (cur.peek() == ']') {
                cur.take();
                break;
            }
            arr.push_back(parse_value(cur));
            cur.skip_trivia(true);
            if (cur.done()) cur.fail("unterminated array");
            if (cur.peek() == ',') {
                cur.take();
            } else if (cur.peek() != ']') {
                cur.fail("expected ',' or ']' in array");
            }
        }
        return arr;
    }
    return parse_scalar(cur, cur.bare_token());
}

}  // namespace

nlohmann::json parse_tomlish(const std::string& text) {
    Cursor cur(text);
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    while (true) {
        cur.skip_trivia(true);
        if (cur.done()) break;
        char c = cur.peek();
        if (c == '[') {
            cur.take();
            cur.skip_trivia(false);
            std::string name = cur.bare_token();
            if (name.empty()) cur.fail("empty table name");
            if (name.find('.') != std::string::npos) cur.fail("nested tables are not supported");
            cur.skip_trivia(false);
            if (cur.done() || cur.peek() != ']') cur.fail("expected ']' after table name");
            cur.take();
            table = &root[name];
            if (table->is_null()) *table = nlohmann::json::object();
        } else {
            std::string key = cur.bare_token();
            if (key.empty()) cur.fail("expected a key");
            cur.skip_trivia(false);
            if (cur.done() || cur.peek() != '=') cur.fail("expected '=' after key '" + key + "'");
            cur.take();
            (*table)[key] = parse_value(cur);
            cur.skip_trivia(false);
            if (!cur.done() && cur.peek() != '\n' && cur.peek() != '#') {
                cur.fail("unexpected trailing content after value for '" + key + "'");
            }
        }
    }
    return root;
}

}  // namespace fedprune
