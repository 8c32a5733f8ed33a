class leapyears
{
    public static void main(String[] args)
    {
        int i=2006;int n;for (n=1990; n<=i ; n++){
        int l=n%4;if (l==0){
            System.out.println("leap year: "+n);
        }}}}
