/* block comment with tricky text: int x = 99; } F(1,2) */
class strings_and_comments
{
    // a semicolon; and a brace } in a line comment with 77
    public static void main(String[] args)
    {
        String litter = "no rewrite here: 123; } F(5,2) \" escaped";
        char semi = ';';
        char digit = '7';
        int real = 58; // trailing comment with 44
        System.out.println(litter + semi + digit + real);
    }
}
