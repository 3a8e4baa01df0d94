// Minimal element tree over expat, enough for the LRML-S and core dialects.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace normforge::xml {

struct Node {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;
    std::string text;  // concatenated character data directly inside this element
    long line = 0;
    long column = 0;

    const std::string* attribute(std::string_view key) const;
    std::string where() const;  // "<name> at line:col"
};

// Throws Error{Syntax} with line:column for malformed input.
Node parse(std::string_view input);

std::string escape(std::string_view text);

// Flat writer: each element on its own line, two-space indentation, or a
// single line when `pretty` is false.
class Writer {
public:
    explicit Writer(bool pretty) : pretty_(pretty) {}

    void open(std::string_view name, std::vector<std::pair<std::string, std::string>> attrs = {});
    void close(std::string_view name);
    void empty(std::string_view name, std::vector<std::pair<std::string, std::string>> attrs = {});
    void leaf(std::string_view name, std::string_view text);
    // Starts a line holding several inline elements; pair with end_inline().
    void begin_inline();
    void end_inline();

    std::string str() const { return out_; }

private:
    void line_start();
    void line_end();
    static std::string tag(std::string_view name,
                           std::vector<std::pair<std::string, std::string>> attrs);

    bool pretty_;
    int depth_ = 0;
    int inline_ = 0;
    std::string out_;
};

} // namespace normforge::xml
