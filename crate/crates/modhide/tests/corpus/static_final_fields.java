class static_final_fields
{
    static final int WIDTH = 640;
    static final int HEIGHT = 480;
    static int runs = 0;

    public static void main(String[] args)
    {
        runs = runs + 1;
        int area = WIDTH * HEIGHT / 100;
        System.out.println(area + runs);
    }
}
