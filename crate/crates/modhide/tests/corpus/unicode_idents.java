class unicode_idents
{
    public static void main(String[] args)
    {
        int caféSize = 42;
        int größe = caféSize + 7;
        System.out.println(größe);
    }
}
