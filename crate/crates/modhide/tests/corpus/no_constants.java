class no_constants
{
    public static void main(String[] args)
    {
        String greeting = "hello";
        String target = "world";
        System.out.println(greeting + ", " + target);
    }
}
