class dense_oneliner { public static void main(String[] args) { int x=12; int y=34; if (x<y) { System.out.println(x*100+y); } } }
