#include "xml_dom.hpp"

#include <algorithm>
#include <expat.h>
#include <memory>

#include "normforge/error.hpp"

namespace normforge::xml {

const std::string* Node::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
        if (k == key) return &v;
    return nullptr;
}

std::string Node::where() const {
    return "<" + name + "> at " + std::to_string(line) + ":" + std::to_string(column);
}

namespace {

struct BuildState {
    XML_Parser parser = nullptr;
    Node root;
    std::vector<Node*> stack;
    bool have_root = false;
};

void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
    auto* st = static_cast<BuildState*>(data);
    Node node;
    node.name = name;
    node.line = static_cast<long>(XML_GetCurrentLineNumber(st->parser));
    node.column = static_cast<long>(XML_GetCurrentColumnNumber(st->parser)) + 1;
    for (int i = 0; attrs[i] != nullptr; i += 2) node.attributes.emplace_back(attrs[i], attrs[i + 1]);
    if (st->stack.empty()) {
        st->root = std::move(node);
        st->have_root = true;
        st->stack.push_back(&st->root);
    } else {
        auto& parent = *st->stack.back();
        parent.children.push_back(std::move(node));
        st->stack.push_back(&parent.children.back());
    }
}

void on_end(void* data, const XML_Char*) { static_cast<BuildState*>(data)->stack.pop_back(); }

void on_text(void* data, const XML_Char* s, int len) {
    auto* st = static_cast<BuildState*>(data);
    if (!st->stack.empty()) st->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

} // namespace

Node parse(std::string_view input) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreate("UTF-8"), &XML_ParserFree);
    BuildState st;
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    if (XML_Parse(parser.get(), input.data(), static_cast<int>(input.size()), XML_TRUE) ==
        XML_STATUS_ERROR) {
        auto line = XML_GetCurrentLineNumber(parser.get());
        auto col = XML_GetCurrentColumnNumber(parser.get()) + 1;
        std::string pos = std::to_string(line) + ":" + std::to_string(col);
        throw Error(ErrorKind::Syntax,
                    "XML error at " + pos + ": " + XML_ErrorString(XML_GetErrorCode(parser.get())),
                    pos);
    }
    if (!st.have_root) throw Error(ErrorKind::Syntax, "XML document has no root element");
    return std::move(st.root);
}

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
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

std::string Writer::tag(std::string_view name,
                        std::vector<std::pair<std::string, std::string>> attrs) {
    std::sort(attrs.begin(), attrs.end());
    std::string out(name);
    for (const auto& [k, v] : attrs) out += " " + k + "=\"" + escape(v) + "\"";
    return out;
}

void Writer::line_start() {
    if (inline_ == 0 && pretty_) out_.append(static_cast<std::size_t>(2 * depth_), ' ');
}

void Writer::line_end() {
    if (inline_ == 0 && pretty_) out_ += '\n';
}

void Writer::open(std::string_view name, std::vector<std::pair<std::string, std::string>> attrs) {
    line_start();
    out_ += "<" + tag(name, std::move(attrs)) + ">";
    line_end();
    ++depth_;
}

void Writer::close(std::string_view name) {
    --depth_;
    line_start();
    out_ += "</" + std::string(name) + ">";
    line_end();
}

void Writer::empty(std::string_view name, std::vector<std::pair<std::string, std::string>> attrs) {
    line_start();
    out_ += "<" + tag(name, std::move(attrs)) + "/>";
    line_end();
}

void Writer::leaf(std::string_view name, std::string_view text) {
    line_start();
    out_ += "<" + std::string(name) + ">" + escape(text) + "</" + std::string(name) + ">";
    line_end();
}

void Writer::begin_inline() {
    line_start();
    ++inline_;
}

void Writer::end_inline() {
    --inline_;
    line_end();
}

} // namespace normforge::xml
