import rospy
import smach


class CancelHeadGoals(smach.State):
    """Drop every pending head goal so the head can be used freely."""

    def __init__(self, robot):
        smach.State.__init__(self, outcomes=["done"])
        self.robot = robot

    def execute(self, userdata=None):
        self.robot.head.cancel_goal()
        return "done"


class WaitTime(smach.State):
    """Sleep for a fixed number of seconds."""

    def __init__(self, robot, waittime=1.0):
        smach.State.__init__(self, outcomes=["waited", "preempted"])
        self.waittime = waittime

    def execute(self, userdata=None):
        rospy.sleep(self.waittime)
        return "preempted" if self.preempt_requested() else "waited"
