class switch_cases
{
    static String describe(int code)
    {
        String label;
        switch (code) {
            case 3:
                label = "retry after " + 9 * code;
                break;
            case 7:
                label = "halt";
                break;
            default:
                label = "code " + code;
                break;
        }
        return label;
    }

    public static void main(String[] args)
    {
        int probe = 21;
        System.out.println(describe(probe % 4));
        System.out.println(describe(7));
    }
}
