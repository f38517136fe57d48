#include "hedgeql/query.hpp"

#include <cctype>
#include <charconv>

namespace hedgeql {

namespace {

enum class TokenKind {
    Ident,
    Number,
    String,
    Star,
    Comma,
    LParen,
    RParen,
    Equal,
    GreaterEqual,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;   // identifier (lowercased) or string payload
    std::string raw;    // identifier as written
    double number = 0.0;
    std::size_t offset = 0;
};

[[noreturn]] void syntax_error(std::size_t offset, const std::string& message) {
    throw Error(ErrorKind::SyntaxError, message).with_position(offset);
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        current_ = Token{};
        current_.offset = pos_;
        if (pos_ >= text_.size()) return;

        const char c = text_[pos_];
        if (c == '*') { current_.kind = TokenKind::Star; ++pos_; return; }
        if (c == ',') { current_.kind = TokenKind::Comma; ++pos_; return; }
        if (c == '(') { current_.kind = TokenKind::LParen; ++pos_; return; }
        if (c == ')') { current_.kind = TokenKind::RParen; ++pos_; return; }
        if (c == '=') { current_.kind = TokenKind::Equal; ++pos_; return; }
        if (c == '>') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                current_.kind = TokenKind::GreaterEqual;
                pos_ += 2;
                return;
            }
            syntax_error(pos_, "expected '>=' after '>'");
        }
        if (c == '"') {
            const std::size_t close = text_.find('"', pos_ + 1);
            if (close == std::string_view::npos)
                syntax_error(pos_, "unterminated string literal");
            current_.kind = TokenKind::String;
            current_.text = std::string(text_.substr(pos_ + 1, close - pos_ - 1));
            pos_ = close + 1;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
            c == '.') {
            const char* begin = text_.data() + pos_;
            const char* end = text_.data() + text_.size();
            double value = 0.0;
            auto [rest, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc())
                syntax_error(pos_, "malformed number");
            current_.kind = TokenKind::Number;
            current_.number = value;
            pos_ = static_cast<std::size_t>(rest - text_.data());
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                    text_[end] == '_'))
                ++end;
            current_.kind = TokenKind::Ident;
            current_.raw = std::string(text_.substr(pos_, end - pos_));
            current_.text = normalize_text(current_.raw);
            pos_ = end;
            return;
        }
        syntax_error(pos_, std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    Token current_;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) {}

    QueryAst parse() {
        QueryAst ast;
        expect_keyword("select");
        parse_projection(ast);
        expect_keyword("from");
        ast.class_name = expect_ident("class name");
        expect_keyword("where");
        ast.where = parse_or();
        if (lexer_.peek().kind != TokenKind::End)
            syntax_error(lexer_.peek().offset, "unexpected trailing input");
        return ast;
    }

private:
    static bool is_keyword(const Token& t, std::string_view kw) {
        return t.kind == TokenKind::Ident && t.text == kw;
    }

    void expect_keyword(std::string_view kw) {
        const Token& t = lexer_.peek();
        if (!is_keyword(t, kw))
            syntax_error(t.offset, "expected keyword '" + std::string(kw) + "'");
        lexer_.take();
    }

    std::string expect_ident(const char* what) {
        const Token& t = lexer_.peek();
        if (t.kind != TokenKind::Ident)
            syntax_error(t.offset, std::string("expected ") + what);
        if (t.text == "select" || t.text == "from" || t.text == "where" ||
            t.text == "and" || t.text == "or")
            syntax_error(t.offset,
                         "keyword '" + t.raw + "' cannot be used as " + what);
        return lexer_.take().raw;
    }

    void parse_projection(QueryAst& ast) {
        if (lexer_.peek().kind == TokenKind::Star) {
            lexer_.take();
            ast.select_all = true;
            return;
        }
        ast.select_all = false;
        ast.projection.push_back(expect_ident("an attribute name"));
        while (lexer_.peek().kind == TokenKind::Comma) {
            lexer_.take();
            ast.projection.push_back(expect_ident("an attribute name"));
        }
    }

    ConditionNode parse_or() {
        ConditionNode first = parse_and();
        if (!is_keyword(lexer_.peek(), "or")) return first;
        OrGroup group;
        group.children.push_back(std::move(first));
        while (is_keyword(lexer_.peek(), "or")) {
            lexer_.take();
            group.children.push_back(parse_and());
        }
        return ConditionNode{std::move(group)};
    }

    ConditionNode parse_and() {
        ConditionNode first = parse_predicate();
        if (!is_keyword(lexer_.peek(), "and")) return first;
        AndGroup group;
        group.children.push_back(std::move(first));
        while (is_keyword(lexer_.peek(), "and")) {
            lexer_.take();
            group.children.push_back(parse_predicate());
        }
        return ConditionNode{std::move(group)};
    }

    ConditionNode parse_predicate() {
        if (lexer_.peek().kind == TokenKind::LParen) {
            lexer_.take();
            ConditionNode inner = parse_or();
            if (lexer_.peek().kind != TokenKind::RParen)
                syntax_error(lexer_.peek().offset, "expected ')'");
            lexer_.take();
            return inner;
        }

        const std::size_t position = lexer_.peek().offset;
        const std::string name = expect_ident("an attribute or method name");

        bool is_method = false;
        if (lexer_.peek().kind == TokenKind::LParen) {
            lexer_.take();
            if (lexer_.peek().kind != TokenKind::RParen)
                syntax_error(lexer_.peek().offset, "expected ')' after method name");
            lexer_.take();
            is_method = true;
        }

        const Token op = lexer_.peek();
        if (op.kind != TokenKind::Equal && op.kind != TokenKind::GreaterEqual)
            syntax_error(op.offset, "expected '=' or '>='");
        lexer_.take();

        const Token rhs = lexer_.peek();
        if (is_method) {
            if (op.kind == TokenKind::GreaterEqual)
                syntax_error(op.offset, "method conditions support only '='");
            if (rhs.kind != TokenKind::String)
                syntax_error(rhs.offset, "method conditions take a quoted term");
            lexer_.take();
            return ConditionNode{MethodPredicate{name, rhs.text, position}};
        }

        AttrPredicate pred;
        pred.attribute = name;
        pred.op = op.kind == TokenKind::Equal ? CompareOp::EqualLevel
                                              : CompareOp::GreaterEqualLevel;
        pred.position = position;
        if (rhs.kind == TokenKind::String) pred.rhs = rhs.text;
        else if (rhs.kind == TokenKind::Number) pred.rhs = rhs.number;
        else syntax_error(rhs.offset, "expected a quoted term or a number");
        lexer_.take();
        return ConditionNode{std::move(pred)};
    }

    Lexer lexer_;
};

} // namespace

QueryAst parse_query(std::string_view text) {
    Parser parser(text);
    QueryAst ast = parser.parse();
    ast.text = std::string(text);
    return ast;
}

} // namespace hedgeql
