class annotations
{
    @interface Budget { int value(); }

    @Budget(30)
    static int limit()
    {
        return 90;
    }

    @SuppressWarnings("unused")
    static int twice(int x)
    {
        return x * 2;
    }

    public static void main(String[] args)
    {
        System.out.println(twice(limit()) + 16);
    }
}
